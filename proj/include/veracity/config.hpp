#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "veracity/classify.hpp"
#include "veracity/features.hpp"
#include "veracity/textprep.hpp"

namespace veracity::cli {

struct TranslationConfig {
    bool enabled = false;
    std::string endpoint; // http(s)://... or stub:<mapping file>
    int timeout_ms = 5000;
    int retries = 2;
};

/// Per-language lexicon file locations; empty entries mean "not provided"
/// and leave that part of the lexicon empty.
struct LexiconPaths {
    std::string stopwords;
    std::string lemma_table;
    std::string signal_perspective;
    std::string signal_comparison;
    std::string signal_examples;
    std::string signal_reasoning;
    std::string general_wordlist;
    std::string company_terms;
    std::string pos_lexicon;
};

/// One config file governs every knob; command-line flags win over it.
struct AppConfig {
    std::filesystem::path base_dir; // config file directory; relative paths resolve against it

    LexiconPaths dutch;
    LexiconPaths english;
    std::string rules_file;          // empty = built-in default rules
    std::string feature_config_file; // empty = built-in defaults
    std::string translation_cache = "translation_cache.jsonl";

    features::Profile profile = features::Profile::Dutch;
    TranslationConfig translation;
    double threshold = 3.0;
    double margin = 1.0;
    bool include_system_prompt = true;
    features::FeatureConfig feature_config;

    static AppConfig defaults();
    static AppConfig load(const std::filesystem::path& path);

    std::filesystem::path resolve(const std::string& p) const;
    /// Endpoint with any stub mapping path resolved against base_dir.
    std::string resolved_endpoint() const;
    text::Lexicon load_lexicon(const LexiconPaths& paths) const;
    classify::TypeRules load_rules() const;
};

} // namespace veracity::cli
