#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "veracity/classify.hpp"
#include "veracity/features.hpp"
#include "veracity/scoring.hpp"

namespace veracity::eval {

struct Correlation {
    double rho = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

/// Spearman rank correlation with average-rank tie handling; two-sided
/// p-value from the t-approximation with n-2 degrees of freedom.
/// Throws StatsError for n < 3 or a constant input.
Correlation spearman(std::span<const double> xs, std::span<const double> ys);

/// Permutation-test p-value (fixed seed), for small n.
Correlation spearman_permutation(std::span<const double> xs, std::span<const double> ys,
                                 std::size_t permutations, std::uint64_t seed);

/// Cohen's kappa between two label sequences of equal length.
double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b);

enum class MetricScope { All, Binary, Instruction, BinaryOrInstruction };

std::string to_string(MetricScope scope);

struct Metrics {
    double f1 = 0.0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

/// `All` macro-averages precision/recall over the present classes and takes
/// F1 as their harmonic mean; the other scopes are one-vs-rest binary tasks.
Metrics classifier_metrics(const std::vector<classify::MessageType>& predicted,
                           const std::vector<classify::MessageType>& actual, MetricScope scope);

/// Per rating, the fraction of records with |score - rating| <= margin
/// (boundary inclusive).
std::map<int, double> margin_accuracy(std::span<const double> scores, std::span<const int> ratings,
                                      double margin);

struct ThresholdRow {
    std::size_t n = 0;
    double eq1 = 0.0;   // override ComponentFail
    double below = 0.0; // score < threshold
    double at = 0.0;    // score == threshold, counted in neither bucket
    double above = 0.0; // score > threshold
    double eq5 = 0.0;   // override GuideMatch
};

struct RatedScore {
    scoring::ScoreResult result;
    int rating = 0;
};

std::map<int, ThresholdRow> threshold_table(const std::vector<RatedScore>& results,
                                            double threshold);

/// Per-feature correlation drop: rho with all features minus rho with the
/// feature excluded from the sum (its override disabled). Positive delta
/// means the feature helps.
std::map<features::FeatureName, double> ablation(const std::vector<RatedScore>& results);

struct FeatureCorrelation {
    features::FeatureName feature{};
    std::optional<Correlation> correlation; // absent when undefined (constant values)
};

struct WorstRecord {
    std::string record_id;
    int rating = 0;
    double score = 0.0;
    double abs_error = 0.0;
    scoring::Override override_applied = scoring::Override::None;
};

struct ReportOptions {
    double threshold = 3.0;
    double margin = 1.0;
    std::size_t permutations = 0; // 0 selects the t-approximation
    std::uint64_t seed = 0;
    bool ablate = false;
    std::size_t worst_k = 10;
    // gold message-type labels by record id, when available
    std::map<std::string, classify::MessageType> gold_types;
};

struct ScoredRecord {
    const corpus::Record* record = nullptr;
    scoring::ScoreResult result;
};

struct EvalReport {
    std::string dataset_name;
    std::size_t total = 0;
    std::size_t rated = 0;
    std::size_t scored = 0;
    std::size_t abstained = 0;
    std::size_t scored_and_rated = 0;

    std::optional<Correlation> correlation;
    std::map<int, double> margin_acc;
    std::map<int, ThresholdRow> threshold_rows;
    std::map<MetricScope, Metrics> classifier; // empty without gold labels
    std::optional<double> kappa;               // predicted vs gold agreement
    std::map<features::FeatureName, double> ablation_deltas;
    std::vector<FeatureCorrelation> feature_correlations;
    std::vector<WorstRecord> worst;

    double threshold = 3.0;
    double margin = 1.0;
    std::size_t gating_suppressed = 0; // scored records below the threshold
};

/// Computes every metric over already-scored records.
EvalReport evaluate(const std::string& dataset_name, const std::vector<ScoredRecord>& scored,
                    const ReportOptions& opts);

/// Writes the delimiter-separated tables plus summary.json into out_dir.
void write_report_files(const EvalReport& report, const std::filesystem::path& out_dir);

nlohmann::json report_to_json(const EvalReport& report);

} // namespace veracity::eval
