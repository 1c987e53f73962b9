#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "veracity/cli.hpp"
#include "veracity/error.hpp"
#include "veracity/version.hpp"

namespace {

struct Cli {
    std::string config_path;
    std::string profile;
    unsigned workers = 0;
    std::int64_t seed = -1;

    // build-lexicon
    std::string help_docs_dir;
    std::string general_wordlist;
    std::size_t top_n = 10000;
    std::string lexicon_output;

    // classify / score / evaluate
    std::string dataset;
    std::string output;
    std::string out_dir = "report";
    double threshold = -1.0;
    double margin = -1.0;
    std::size_t permutations = 0;
    bool ablate = false;
    std::string type_labels;
    bool translate = false;
};

veracity::cli::AppConfig resolve_config(const Cli& cli) {
    auto cfg = cli.config_path.empty() ? veracity::cli::AppConfig::defaults()
                                       : veracity::cli::AppConfig::load(cli.config_path);
    // flags win over the config file
    if (!cli.profile.empty()) cfg.profile = veracity::features::profile_from_string(cli.profile);
    if (cli.threshold >= 0.0) cfg.threshold = cli.threshold;
    if (cli.margin >= 0.0) cfg.margin = cli.margin;
    if (cli.translate) cfg.translation.enabled = true;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"veracity - reference-free truthfulness scoring for RAG chatbot answers"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may trail the subcommand

    Cli cli;
    app.add_option("--config", cli.config_path, "Config file (JSON)")->envname("VERACITY_CONFIG");
    app.add_option("--profile", cli.profile, "Preprocessing profile: dutch or english")
        ->check(CLI::IsMember({"dutch", "english"}))
        ->envname("VERACITY_PROFILE");
    app.add_option("--workers", cli.workers, "Scoring worker threads (default: all cores)")
        ->envname("VERACITY_WORKERS");
    app.add_option("--seed", cli.seed, "Seed for randomized modes")->envname("VERACITY_SEED");
    app.set_version_flag("--version", veracity::kVersion);

    auto* build = app.add_subcommand("build-lexicon", "Build the company-terms wordlist");
    build->add_option("--help-docs", cli.help_docs_dir, "Directory of plain-text help documents")
        ->required();
    build->add_option("--general-wordlist", cli.general_wordlist,
                      "General-language wordlist (overrides config)");
    build->add_option("--top", cli.top_n, "Number of terms to keep (default 10000)");
    build->add_option("--output", cli.lexicon_output, "Output file")->required();

    auto* classify = app.add_subcommand("classify", "Label message types and print a histogram");
    classify->add_option("--dataset", cli.dataset, "Dataset (JSONL)")->required();
    classify->add_option("--output", cli.output, "Labels file (TSV); stdout when omitted");

    auto* score = app.add_subcommand("score", "Score a dataset for truthfulness");
    score->add_option("--dataset", cli.dataset, "Dataset (JSONL)")->required();
    score->add_option("--output", cli.output, "Scored records (JSONL)")->required();
    score->add_option("--threshold", cli.threshold, "Gating threshold (default 3.0)");
    score->add_flag("--translate", cli.translate, "Enable machine translation");

    auto* evaluate = app.add_subcommand("evaluate", "Score and compare against human ratings");
    evaluate->add_option("--dataset", cli.dataset, "Dataset (JSONL)")->required();
    evaluate->add_option("--out-dir", cli.out_dir, "Report directory (default: report)");
    evaluate->add_option("--threshold", cli.threshold, "Neutral threshold (default 3.0)");
    evaluate->add_option("--margin", cli.margin, "Error margin (default 1.0)");
    evaluate->add_option("--permutations", cli.permutations,
                         "Permutation-test iterations (0 = t-approximation)");
    evaluate->add_flag("--ablate", cli.ablate, "Append the per-feature ablation study");
    evaluate->add_option("--type-labels", cli.type_labels,
                         "Gold message-type labels (TSV: id TAB type)");
    evaluate->add_flag("--translate", cli.translate, "Enable machine translation");

    auto* cache = app.add_subcommand("translate-cache", "Translation cache maintenance");
    cache->require_subcommand(1);
    auto* warm = cache->add_subcommand("warm", "Translate every record into the cache");
    warm->add_option("--dataset", cli.dataset, "Dataset (JSONL)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = resolve_config(cli);
        veracity::cli::GlobalOptions global;
        global.workers = cli.workers;
        if (cli.seed >= 0) global.seed = static_cast<std::uint64_t>(cli.seed);

        if (build->parsed()) {
            std::optional<std::string> general;
            if (!cli.general_wordlist.empty()) general = cli.general_wordlist;
            return veracity::cli::cmd_build_lexicon(cfg, cli.help_docs_dir, general, cli.top_n,
                                                    cli.lexicon_output);
        }
        if (classify->parsed()) {
            std::optional<std::string> output;
            if (!cli.output.empty()) output = cli.output;
            return veracity::cli::cmd_classify(cfg, cli.dataset, output);
        }
        if (score->parsed()) return veracity::cli::cmd_score(cfg, cli.dataset, cli.output, global);
        if (evaluate->parsed()) {
            veracity::cli::EvaluateArgs args;
            args.dataset_path = cli.dataset;
            args.out_dir = cli.out_dir;
            args.permutations = cli.permutations;
            args.ablate = cli.ablate;
            if (!cli.type_labels.empty()) args.type_labels_path = cli.type_labels;
            return veracity::cli::cmd_evaluate(cfg, args, global);
        }
        if (warm->parsed()) return veracity::cli::cmd_cache_warm(cfg, cli.dataset);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
