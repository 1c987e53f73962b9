#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "veracity/config.hpp"
#include "veracity/corpus.hpp"
#include "veracity/eval.hpp"
#include "veracity/scoring.hpp"

namespace veracity::cli {

struct GlobalOptions {
    unsigned workers = 0; // 0 = hardware concurrency
    std::optional<std::uint64_t> seed;
};

/// Builds translated scoring inputs as dictated by profile and translation
/// settings. Fatal when the english profile meets an untranslatable record.
std::vector<features::ScoringInput> prepare_inputs(const corpus::Dataset& ds,
                                                   const AppConfig& cfg);

/// Scores inputs across `workers` threads; output order matches input order
/// regardless of the worker count.
std::vector<scoring::ScoreResult> score_parallel(const std::vector<features::ScoringInput>& inputs,
                                                 const scoring::ScoringContext& ctx,
                                                 unsigned workers);

scoring::ScoringContext make_scoring_context(const AppConfig& cfg, const text::Lexicon& dutch,
                                             const text::Lexicon& english);

int cmd_build_lexicon(const AppConfig& cfg, const std::filesystem::path& help_docs_dir,
                      const std::optional<std::string>& general_wordlist_override, std::size_t top_n,
                      const std::filesystem::path& output);

int cmd_classify(const AppConfig& cfg, const std::filesystem::path& dataset_path,
                 const std::optional<std::string>& output_path);

int cmd_score(const AppConfig& cfg, const std::filesystem::path& dataset_path,
              const std::filesystem::path& output_path, const GlobalOptions& global);

struct EvaluateArgs {
    std::filesystem::path dataset_path;
    std::filesystem::path out_dir;
    std::size_t permutations = 0;
    bool ablate = false;
    std::optional<std::string> type_labels_path;
};

int cmd_evaluate(const AppConfig& cfg, const EvaluateArgs& args, const GlobalOptions& global);

int cmd_cache_warm(const AppConfig& cfg, const std::filesystem::path& dataset_path);

} // namespace veracity::cli
