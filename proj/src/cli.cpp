#include "veracity/cli.hpp"

#include <atomic>
#include <exception>
#include <sstream>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "veracity/error.hpp"
#include "veracity/translate.hpp"
#include "veracity/util.hpp"
#include "veracity/version.hpp"

using nlohmann::json;

namespace veracity::cli {

std::vector<features::ScoringInput> prepare_inputs(const corpus::Dataset& ds,
                                                   const AppConfig& cfg) {
    std::vector<features::ScoringInput> inputs;
    inputs.reserve(ds.records.size());

    const bool english = cfg.profile == features::Profile::English;
    std::unique_ptr<text::TranslationClient> client;
    std::unique_ptr<text::TranslationCache> cache;
    if (english && cfg.translation.enabled) {
        client = text::make_translation_client(cfg.resolved_endpoint(), cfg.translation.timeout_ms,
                                               cfg.translation.retries);
        cache = std::make_unique<text::TranslationCache>(cfg.resolve(cfg.translation_cache));
    }

    for (const auto& r : ds.records) {
        features::ScoringInput input;
        input.original = r;
        if (english && r.language == corpus::Language::Dutch) {
            if (!cfg.translation.enabled)
                throw ConfigError("record " + r.id +
                                  " is Dutch but the english profile runs with translation "
                                  "disabled; translate the dataset or enable translation");
            input.translated = text::translate_record(r, *client, *cache);
        }
        inputs.push_back(std::move(input));
    }
    return inputs;
}

std::vector<scoring::ScoreResult> score_parallel(const std::vector<features::ScoringInput>& inputs,
                                                 const scoring::ScoringContext& ctx,
                                                 unsigned workers) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, std::max<std::size_t>(inputs.size(), 1));

    std::vector<scoring::ScoreResult> results(inputs.size());
    if (inputs.empty()) return results;

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < inputs.size(); i = next.fetch_add(1)) {
            try {
                results[i] = scoring::score_record(inputs[i], ctx);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        for (unsigned i = 0; i < workers; ++i) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

scoring::ScoringContext make_scoring_context(const AppConfig& cfg, const text::Lexicon& dutch,
                                             const text::Lexicon& english) {
    return scoring::ScoringContext(
        cfg.load_rules(), features::ExtractionContext(dutch, english, cfg.feature_config,
                                                      cfg.profile, cfg.include_system_prompt));
}

namespace {

corpus::Dataset load_or_die(const std::filesystem::path& path, const std::string& name) {
    auto result = corpus::load_dataset(path, name);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& s : result.skipped)
        std::cerr << "warning: skipped malformed line " << s.line_no << ": " << s.reason << '\n';
    if (!result.skipped.empty())
        std::cerr << "warning: " << result.skipped.size() << " line(s) skipped\n";
    return std::move(result.dataset);
}

std::map<std::string, classify::MessageType> load_type_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open type labels file: " + path.string());
    std::map<std::string, classify::MessageType> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ValidationError("type labels " + path.string() + " line " +
                                  std::to_string(line_no) + ": expected id TAB type");
        labels[util::trim(line.substr(0, tab))] =
            classify::type_from_string(util::trim(util::to_lower(line.substr(tab + 1))));
    }
    return labels;
}

} // namespace

int cmd_build_lexicon(const AppConfig& cfg, const std::filesystem::path& help_docs_dir,
                      const std::optional<std::string>& general_wordlist_override,
                      std::size_t top_n, const std::filesystem::path& output) {
    if (!std::filesystem::is_directory(help_docs_dir))
        throw IoError("help docs directory does not exist: " + help_docs_dir.string());

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(help_docs_dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no help documents in " + help_docs_dir.string());

    std::vector<std::string> docs;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw IoError("cannot read help document: " + f.string());
        docs.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    text::Lexicon dutch = cfg.load_lexicon(cfg.dutch);
    std::set<std::string> general = dutch.general_wordlist;
    if (general_wordlist_override) general = text::load_wordlist(*general_wordlist_override);

    auto freqs = features::company_term_frequencies(docs, general, text::PrepProfile::dutch(), dutch);
    if (freqs.empty()) std::cerr << "warning: every help-doc word is in the general wordlist\n";

    std::ofstream out(output);
    if (!out) throw IoError("cannot write company terms file: " + output.string());
    for (std::size_t i = 0; i < freqs.size() && i < top_n; ++i) out << freqs[i].first << '\n';

    std::cout << "company terms written: " << std::min<std::size_t>(freqs.size(), top_n) << " of "
              << freqs.size() << " candidates (from " << files.size() << " documents)\n";
    return 0;
}

int cmd_classify(const AppConfig& cfg, const std::filesystem::path& dataset_path,
                 const std::optional<std::string>& output_path) {
    corpus::Dataset ds = load_or_die(dataset_path, dataset_path.stem().string());
    classify::TypeRules rules = cfg.load_rules();

    std::map<classify::MessageType, std::size_t> histogram;
    std::ostringstream lines;
    for (const auto& r : ds.records) {
        auto type = classify::classify_message(r.message, rules);
        ++histogram[type];
        lines << r.id << '\t' << classify::to_string(type) << '\n';
    }

    if (output_path) {
        std::ofstream out(*output_path);
        if (!out) throw IoError("cannot write labels file: " + *output_path);
        out << "# schema_version=" << kSchemaVersion << '\n';
        out << lines.str();
    } else {
        std::cout << lines.str();
    }

    std::cout << "type histogram (" << ds.records.size() << " records):\n";
    for (auto type : classify::kAllTypes) {
        auto it = histogram.find(type);
        std::cout << "  " << classify::to_string(type) << '\t'
                  << (it == histogram.end() ? 0 : it->second) << '\n';
    }
    return 0;
}

int cmd_score(const AppConfig& cfg, const std::filesystem::path& dataset_path,
              const std::filesystem::path& output_path, const GlobalOptions& global) {
    corpus::Dataset ds = load_or_die(dataset_path, dataset_path.stem().string());
    text::Lexicon dutch = cfg.load_lexicon(cfg.dutch);
    text::Lexicon english = cfg.load_lexicon(cfg.english);
    auto ctx = make_scoring_context(cfg, dutch, english);

    auto inputs = prepare_inputs(ds, cfg);
    auto results = score_parallel(inputs, ctx, global.workers);

    std::ofstream out(output_path);
    if (!out) throw IoError("cannot write scores file: " + output_path.string());
    std::size_t scored = 0, suppressed = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        out << scoring::scored_record_json(inputs[i].original, results[i]).dump() << '\n';
        if (results[i].score) {
            ++scored;
            if (*results[i].score < cfg.threshold) ++suppressed;
        }
    }

    std::cout << "records: " << results.size() << ", scored: " << scored
              << ", abstained: " << results.size() - scored << '\n';
    std::cout << "gating (threshold " << cfg.threshold << "): " << suppressed << " of " << scored
              << " scored records below threshold (do-not-send set)\n";
    return 0;
}

int cmd_evaluate(const AppConfig& cfg, const EvaluateArgs& args, const GlobalOptions& global) {
    corpus::Dataset ds = load_or_die(args.dataset_path, args.dataset_path.stem().string());
    if (ds.records.empty()) throw ValidationError("dataset is empty: " + args.dataset_path.string());

    text::Lexicon dutch = cfg.load_lexicon(cfg.dutch);
    text::Lexicon english = cfg.load_lexicon(cfg.english);
    auto ctx = make_scoring_context(cfg, dutch, english);

    auto inputs = prepare_inputs(ds, cfg);
    auto results = score_parallel(inputs, ctx, global.workers);

    eval::ReportOptions opts;
    opts.threshold = cfg.threshold;
    opts.margin = cfg.margin;
    opts.permutations = args.permutations;
    opts.ablate = args.ablate;
    if (args.permutations > 0) {
        if (!global.seed)
            throw ConfigError("--permutations requires an explicit --seed for reproducibility");
        opts.seed = *global.seed;
    }
    if (args.type_labels_path) opts.gold_types = load_type_labels(*args.type_labels_path);

    std::vector<eval::ScoredRecord> scored;
    scored.reserve(results.size());
    for (std::size_t i = 0; i < results.size(); ++i)
        scored.push_back({&ds.records[i], std::move(results[i])});

    eval::EvalReport report = eval::evaluate(ds.name, scored, opts);
    eval::write_report_files(report, args.out_dir);

    if (report.correlation)
        std::cout << "spearman rho " << report.correlation->rho << " (p "
                  << report.correlation->p_value << ", n " << report.correlation->n << ")\n";
    else
        std::cout << "spearman correlation: not applicable (need >= 3 scored+rated records)\n";
    std::cout << "scored " << report.scored << " / " << report.total << " records ("
              << report.abstained << " abstained); report written to " << args.out_dir.string()
              << '\n';
    return 0;
}

int cmd_cache_warm(const AppConfig& cfg, const std::filesystem::path& dataset_path) {
    if (cfg.translation.endpoint.empty())
        throw ConfigError("translation endpoint is not configured");

    corpus::Dataset ds = load_or_die(dataset_path, dataset_path.stem().string());
    auto client = text::make_translation_client(cfg.resolved_endpoint(), cfg.translation.timeout_ms,
                                                cfg.translation.retries);
    text::TranslationCache cache(cfg.resolve(cfg.translation_cache));

    const std::size_t before = cache.size();
    std::size_t records = 0;
    for (const auto& r : ds.records) {
        if (r.language != corpus::Language::Dutch) continue;
        text::translate_record(r, *client, cache);
        ++records;
    }
    std::cout << "warmed cache with " << records << " records: " << cache.size() - before
              << " new entries (" << cache.size() << " total)\n";
    return 0;
}

} // namespace veracity::cli
