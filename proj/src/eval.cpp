#include "veracity/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "veracity/error.hpp"
#include "veracity/version.hpp"

using nlohmann::json;

namespace veracity::eval {

namespace {

// Regularized incomplete beta via the Lentz continued fraction; backs the
// two-sided t-distribution p-value.
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_two_sided_p(double t, double df) {
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va == 0.0 || vb == 0.0) throw StatsError("correlation undefined for constant input");
    return cov / std::sqrt(va * vb);
}

bool is_constant(std::span<const double> v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] != v[0]) return false;
    return true;
}

double spearman_rho(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw StatsError("input lengths differ");
    if (xs.size() < 3) throw StatsError("need at least 3 observations");
    if (is_constant(xs) || is_constant(ys))
        throw StatsError("correlation undefined for constant input");
    double rho = pearson(average_ranks(xs), average_ranks(ys));
    return std::clamp(rho, -1.0, 1.0);
}

} // namespace

Correlation spearman(std::span<const double> xs, std::span<const double> ys) {
    Correlation out;
    out.rho = spearman_rho(xs, ys);
    out.n = xs.size();

    const double df = static_cast<double>(out.n - 2);
    const double denom = 1.0 - out.rho * out.rho;
    if (denom <= 0.0) {
        out.p_value = 0.0;
    } else {
        const double t = out.rho * std::sqrt(df / denom);
        out.p_value = t_two_sided_p(t, df);
    }
    return out;
}

Correlation spearman_permutation(std::span<const double> xs, std::span<const double> ys,
                                 std::size_t permutations, std::uint64_t seed) {
    if (permutations == 0) throw StatsError("permutation count must be positive");

    Correlation out;
    out.rho = spearman_rho(xs, ys);
    out.n = xs.size();

    std::mt19937_64 rng(seed);
    std::vector<double> shuffled(ys.begin(), ys.end());
    std::size_t at_least = 0;
    for (std::size_t i = 0; i < permutations; ++i) {
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const double rho = spearman_rho(xs, shuffled);
        if (std::fabs(rho) >= std::fabs(out.rho) - 1e-12) ++at_least;
    }
    out.p_value = static_cast<double>(at_least + 1) / static_cast<double>(permutations + 1);
    return out;
}

double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size()) throw StatsError("label lists differ in length");
    if (a.empty()) throw StatsError("label lists are empty");

    const double n = static_cast<double>(a.size());
    std::map<std::string, double> margin_a, margin_b;
    double agree = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        margin_a[a[i]] += 1.0;
        margin_b[b[i]] += 1.0;
        if (a[i] == b[i]) agree += 1.0;
    }
    const double p_o = agree / n;
    double p_e = 0.0;
    for (const auto& [label, count] : margin_a) {
        auto it = margin_b.find(label);
        if (it != margin_b.end()) p_e += (count / n) * (it->second / n);
    }
    if (std::fabs(1.0 - p_e) < 1e-15) return 1.0; // both raters constant and identical
    return (p_o - p_e) / (1.0 - p_e);
}

std::string to_string(MetricScope scope) {
    switch (scope) {
    case MetricScope::All: return "all";
    case MetricScope::Binary: return "binary";
    case MetricScope::Instruction: return "instruction";
    case MetricScope::BinaryOrInstruction: return "binary_or_instruction";
    }
    return "?";
}

namespace {

Metrics binary_task_metrics(const std::vector<bool>& predicted, const std::vector<bool>& actual) {
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] && actual[i]) ++tp;
        else if (predicted[i] && !actual[i]) ++fp;
        else if (!predicted[i] && actual[i]) ++fn;
        else ++tn;
    }
    Metrics m;
    m.precision = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
    m.recall = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    m.accuracy = (tp + tn) / static_cast<double>(predicted.size());
    return m;
}

} // namespace

Metrics classifier_metrics(const std::vector<classify::MessageType>& predicted,
                           const std::vector<classify::MessageType>& actual, MetricScope scope) {
    if (predicted.size() != actual.size()) throw StatsError("label lists differ in length");
    if (predicted.empty()) throw StatsError("label lists are empty");

    if (scope == MetricScope::All) {
        std::set<classify::MessageType> labels(actual.begin(), actual.end());
        labels.insert(predicted.begin(), predicted.end());

        double sum_p = 0.0, sum_r = 0.0, correct = 0.0;
        for (auto label : labels) {
            double tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < predicted.size(); ++i) {
                if (predicted[i] == label && actual[i] == label) ++tp;
                else if (predicted[i] == label) ++fp;
                else if (actual[i] == label) ++fn;
            }
            sum_p += (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
            sum_r += (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
        }
        for (std::size_t i = 0; i < predicted.size(); ++i)
            if (predicted[i] == actual[i]) ++correct;

        Metrics m;
        m.precision = sum_p / static_cast<double>(labels.size());
        m.recall = sum_r / static_cast<double>(labels.size());
        m.f1 = (m.precision + m.recall) > 0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        m.accuracy = correct / static_cast<double>(predicted.size());
        return m;
    }

    auto project = [&](classify::MessageType t) {
        switch (scope) {
        case MetricScope::Binary: return t == classify::MessageType::Binary;
        case MetricScope::Instruction: return t == classify::MessageType::Instruction;
        default: return classify::is_scorable(t);
        }
    };
    std::vector<bool> p, a;
    p.reserve(predicted.size());
    a.reserve(actual.size());
    for (auto t : predicted) p.push_back(project(t));
    for (auto t : actual) a.push_back(project(t));
    return binary_task_metrics(p, a);
}

std::map<int, double> margin_accuracy(std::span<const double> scores, std::span<const int> ratings,
                                      double margin) {
    if (scores.size() != ratings.size()) throw StatsError("score/rating lengths differ");
    if (margin <= 0.0) throw StatsError("margin must be positive");

    std::map<int, std::pair<std::size_t, std::size_t>> counts; // rating -> (within, total)
    for (std::size_t i = 0; i < scores.size(); ++i) {
        auto& [within, total] = counts[ratings[i]];
        ++total;
        if (std::fabs(scores[i] - ratings[i]) <= margin) ++within;
    }
    std::map<int, double> out;
    for (const auto& [rating, wt] : counts)
        out[rating] = static_cast<double>(wt.first) / static_cast<double>(wt.second);
    return out;
}

std::map<int, ThresholdRow> threshold_table(const std::vector<RatedScore>& results,
                                            double threshold) {
    std::map<int, ThresholdRow> rows;
    std::map<int, std::array<std::size_t, 5>> counts; // eq1, below, at, above, eq5
    for (const auto& rs : results) {
        if (!rs.result.score) throw StatsError("threshold table needs scored records");
        auto& c = counts[rs.rating];
        rows[rs.rating].n += 1;
        const double score = *rs.result.score;
        if (rs.result.override_applied == scoring::Override::ComponentFail) ++c[0];
        if (score < threshold) ++c[1];
        else if (score == threshold) ++c[2];
        else ++c[3];
        if (rs.result.override_applied == scoring::Override::GuideMatch) ++c[4];
    }
    for (auto& [rating, row] : rows) {
        const auto& c = counts[rating];
        const double n = static_cast<double>(row.n);
        row.eq1 = c[0] / n;
        row.below = c[1] / n;
        row.at = c[2] / n;
        row.above = c[3] / n;
        row.eq5 = c[4] / n;
    }
    return rows;
}

std::map<features::FeatureName, double> ablation(const std::vector<RatedScore>& results) {
    std::vector<double> scores, ratings;
    for (const auto& rs : results) {
        if (!rs.result.score || !rs.result.features)
            throw StatsError("ablation needs scored records with features");
        scores.push_back(*rs.result.score);
        ratings.push_back(static_cast<double>(rs.rating));
    }
    const double rho_all = spearman(scores, ratings).rho;

    std::map<features::FeatureName, double> deltas;
    for (auto feature : features::kAllFeatures) {
        std::vector<double> reduced;
        reduced.reserve(results.size());
        for (const auto& rs : results)
            reduced.push_back(scoring::score_excluding(*rs.result.features, feature).first);
        deltas[feature] = rho_all - spearman(reduced, ratings).rho;
    }
    return deltas;
}

EvalReport evaluate(const std::string& dataset_name, const std::vector<ScoredRecord>& scored,
                    const ReportOptions& opts) {
    EvalReport report;
    report.dataset_name = dataset_name;
    report.threshold = opts.threshold;
    report.margin = opts.margin;
    report.total = scored.size();

    std::vector<RatedScore> rated_scores;
    std::vector<double> xs, ys;
    for (const auto& sr : scored) {
        if (sr.record->human_rating) ++report.rated;
        if (sr.result.abstained) {
            ++report.abstained;
            continue;
        }
        ++report.scored;
        if (*sr.result.score < opts.threshold) ++report.gating_suppressed;
        if (sr.record->human_rating) {
            rated_scores.push_back({sr.result, *sr.record->human_rating});
            xs.push_back(*sr.result.score);
            ys.push_back(static_cast<double>(*sr.record->human_rating));
        }
    }
    report.scored_and_rated = rated_scores.size();

    try {
        report.correlation = opts.permutations > 0
                                 ? spearman_permutation(xs, ys, opts.permutations, opts.seed)
                                 : spearman(xs, ys);
    } catch (const StatsError&) {
        report.correlation.reset(); // not applicable on this data
    }

    if (!rated_scores.empty()) {
        std::vector<int> ratings;
        for (const auto& rs : rated_scores) ratings.push_back(rs.rating);
        report.margin_acc = margin_accuracy(xs, ratings, opts.margin);
        report.threshold_rows = threshold_table(rated_scores, opts.threshold);
    }

    if (!opts.gold_types.empty()) {
        std::vector<classify::MessageType> predicted, actual;
        for (const auto& sr : scored) {
            auto it = opts.gold_types.find(sr.record->id);
            if (it == opts.gold_types.end()) continue;
            predicted.push_back(sr.result.message_type);
            actual.push_back(it->second);
        }
        if (!predicted.empty()) {
            for (auto scope : {MetricScope::All, MetricScope::Binary, MetricScope::Instruction,
                               MetricScope::BinaryOrInstruction})
                report.classifier[scope] = classifier_metrics(predicted, actual, scope);
            std::vector<std::string> pa, ga;
            for (auto t : predicted) pa.push_back(classify::to_string(t));
            for (auto t : actual) ga.push_back(classify::to_string(t));
            report.kappa = cohen_kappa(pa, ga);
        }
    }

    if (opts.ablate && report.correlation) report.ablation_deltas = ablation(rated_scores);

    // Per-feature correlation against the ratings (the selection prefilter
    // view); undefined correlations are reported as absent.
    if (report.scored_and_rated >= 3) {
        std::vector<double> ratings;
        for (const auto& rs : rated_scores) ratings.push_back(static_cast<double>(rs.rating));
        for (auto feature : features::kAllFeatures) {
            FeatureCorrelation fc;
            fc.feature = feature;
            std::vector<double> values;
            for (const auto& rs : rated_scores)
                values.push_back(rs.result.features->at(feature).value);
            try {
                fc.correlation = spearman(values, ratings);
            } catch (const StatsError&) {
                fc.correlation.reset();
            }
            report.feature_correlations.push_back(std::move(fc));
        }
    }

    std::vector<WorstRecord> worst;
    for (const auto& rs : rated_scores) {
        WorstRecord w;
        w.record_id = rs.result.record_id;
        w.rating = rs.rating;
        w.score = *rs.result.score;
        w.abs_error = std::fabs(w.score - w.rating);
        w.override_applied = rs.result.override_applied;
        worst.push_back(std::move(w));
    }
    std::sort(worst.begin(), worst.end(), [](const WorstRecord& a, const WorstRecord& b) {
        if (a.abs_error != b.abs_error) return a.abs_error > b.abs_error;
        return a.record_id < b.record_id;
    });
    if (worst.size() > opts.worst_k) worst.resize(opts.worst_k);
    report.worst = std::move(worst);

    return report;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string significance(const Correlation& c) {
    if (c.p_value < 0.01) return "**";
    if (c.p_value < 0.05) return "*";
    return "";
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write report file: " + p.string());
    // JSON outputs carry schema_version as a field instead
    if (p.extension() == ".tsv") out << "# schema_version=" << kSchemaVersion << '\n';
    return out;
}

} // namespace

json report_to_json(const EvalReport& r) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["dataset"] = r.dataset_name;
    j["counts"] = {{"total", r.total},
                   {"rated", r.rated},
                   {"scored", r.scored},
                   {"abstained", r.abstained},
                   {"scored_and_rated", r.scored_and_rated}};
    if (r.correlation)
        j["correlation"] = {{"rho", r.correlation->rho},
                            {"p_value", r.correlation->p_value},
                            {"n", r.correlation->n}};
    else
        j["correlation"] = nullptr;

    json margins = json::object();
    for (const auto& [rating, frac] : r.margin_acc) margins[std::to_string(rating)] = frac;
    j["margin_accuracy"] = margins;
    j["margin"] = r.margin;

    json thresholds = json::object();
    for (const auto& [rating, row] : r.threshold_rows)
        thresholds[std::to_string(rating)] = {{"n", row.n},         {"score_eq1", row.eq1},
                                              {"below", row.below}, {"at", row.at},
                                              {"above", row.above}, {"score_eq5", row.eq5}};
    j["threshold_table"] = thresholds;
    j["threshold"] = r.threshold;
    j["gating"] = {{"suppressed", r.gating_suppressed},
                   {"scored", r.scored},
                   {"fraction", r.scored > 0
                                    ? static_cast<double>(r.gating_suppressed) / r.scored
                                    : 0.0}};

    if (!r.classifier.empty()) {
        json metrics = json::object();
        for (const auto& [scope, m] : r.classifier)
            metrics[to_string(scope)] = {{"f1", m.f1},
                                         {"accuracy", m.accuracy},
                                         {"precision", m.precision},
                                         {"recall", m.recall}};
        j["classifier_metrics"] = metrics;
    } else {
        j["classifier_metrics"] = nullptr;
    }
    if (r.kappa)
        j["kappa"] = *r.kappa;
    else
        j["kappa"] = nullptr;

    if (!r.ablation_deltas.empty()) {
        json deltas = json::object();
        for (const auto& [feature, delta] : r.ablation_deltas)
            deltas[features::to_string(feature)] = delta;
        j["ablation"] = deltas;
    } else {
        j["ablation"] = nullptr;
    }

    json fcs = json::object();
    for (const auto& fc : r.feature_correlations) {
        if (fc.correlation)
            fcs[features::to_string(fc.feature)] = {{"rho", fc.correlation->rho},
                                                    {"p_value", fc.correlation->p_value}};
        else
            fcs[features::to_string(fc.feature)] = nullptr;
    }
    j["feature_correlations"] = fcs;

    json worst = json::array();
    for (const auto& w : r.worst)
        worst.push_back({{"id", w.record_id},
                         {"rating", w.rating},
                         {"score", w.score},
                         {"abs_error", w.abs_error},
                         {"override", scoring::to_string(w.override_applied)}});
    j["worst_records"] = worst;
    return j;
}

void write_report_files(const EvalReport& r, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    {
        auto out = open_out(out_dir / "correlation.tsv");
        out << "set\tn\trho\tp_value\tsignificance\n";
        if (r.correlation) {
            out << r.dataset_name << '\t' << r.correlation->n << '\t' << fmt(r.correlation->rho)
                << '\t' << fmt(r.correlation->p_value) << '\t' << significance(*r.correlation)
                << '\n';
        } else {
            out << r.dataset_name << '\t' << r.scored_and_rated << "\tna\tna\t\n";
        }
    }

    if (!r.classifier.empty()) {
        auto out = open_out(out_dir / "classifier_metrics.tsv");
        out << "scope\tf1\taccuracy\tprecision\trecall\n";
        for (const auto& [scope, m] : r.classifier)
            out << to_string(scope) << '\t' << fmt(m.f1) << '\t' << fmt(m.accuracy) << '\t'
                << fmt(m.precision) << '\t' << fmt(m.recall) << '\n';
    }

    {
        auto out = open_out(out_dir / "score_table.tsv");
        out << "rating\tn\tmargin_within\tscore_eq1\tbelow\tat\tabove\tscore_eq5\n";
        for (const auto& [rating, row] : r.threshold_rows) {
            auto margin_it = r.margin_acc.find(rating);
            out << rating << '\t' << row.n << '\t'
                << (margin_it != r.margin_acc.end() ? fmt(margin_it->second) : "na") << '\t'
                << fmt(row.eq1) << '\t' << fmt(row.below) << '\t' << fmt(row.at) << '\t'
                << fmt(row.above) << '\t' << fmt(row.eq5) << '\n';
        }
    }

    {
        auto out = open_out(out_dir / "feature_correlations.tsv");
        out << "feature\trho\tp_value\n";
        for (const auto& fc : r.feature_correlations) {
            out << features::to_string(fc.feature) << '\t';
            if (fc.correlation)
                out << fmt(fc.correlation->rho) << '\t' << fmt(fc.correlation->p_value) << '\n';
            else
                out << "na\tna\n";
        }
    }

    if (!r.ablation_deltas.empty()) {
        auto out = open_out(out_dir / "ablation.tsv");
        out << "feature\tdelta_rho\n";
        for (const auto& [feature, delta] : r.ablation_deltas)
            out << features::to_string(feature) << '\t' << fmt(delta) << '\n';
    }

    {
        auto out = open_out(out_dir / "worst_records.tsv");
        out << "id\trating\tscore\tabs_error\toverride\n";
        for (const auto& w : r.worst)
            out << w.record_id << '\t' << w.rating << '\t' << fmt(w.score) << '\t'
                << fmt(w.abs_error) << '\t' << scoring::to_string(w.override_applied) << '\n';
    }

    {
        auto out = open_out(out_dir / "summary.json");
        out << report_to_json(r).dump(2) << '\n';
    }
}

} // namespace veracity::eval
