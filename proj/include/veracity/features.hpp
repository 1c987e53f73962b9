#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "veracity/corpus.hpp"
#include "veracity/textprep.hpp"

namespace veracity::features {

enum class FeatureName {
    CompanyTerms,
    ComponentsDefined,
    ComplexAnswer,
    PromptOverlap,
    Hal,
    SubjectCombination,
    VerbatimGuide,
};

inline constexpr std::array<FeatureName, 7> kAllFeatures = {
    FeatureName::CompanyTerms,   FeatureName::ComponentsDefined, FeatureName::ComplexAnswer,
    FeatureName::PromptOverlap,  FeatureName::Hal,               FeatureName::SubjectCombination,
    FeatureName::VerbatimGuide,
};

std::string to_string(FeatureName name);
FeatureName feature_from_string(const std::string& s);

/// One extracted feature: a value in [0,1] plus diagnostics. For
/// ComponentsDefined the override signal means "at least one undefined
/// component"; for VerbatimGuide it means "a context guide matched".
struct FeatureValue {
    FeatureName name{};
    double value = 0.0;
    bool override_signal = false;
    nlohmann::json diagnostics = nlohmann::json::object();
};

/// Exactly the seven features, keyed by name.
class FeatureVector {
public:
    void set(FeatureValue v);
    const FeatureValue& at(FeatureName name) const; // throws when unset
    bool complete() const;
    const std::optional<FeatureValue>& slot(FeatureName name) const;

private:
    std::array<std::optional<FeatureValue>, kAllFeatures.size()> values_;
};

struct Component {
    std::string text; // normalized: lowercased, whitespace-collapsed
};

struct Guide {
    std::vector<std::string> steps;
};

/// Sliding-window co-occurrence weights. Directional pairs are folded onto
/// unordered keys; a pair at distance d contributes weight (window - d + 1).
class HalMatrix {
public:
    HalMatrix() = default;

    int window = 0;
    double weight_of(const std::string& a, const std::string& b) const;
    double max_weight() const { return max_weight_; }
    std::size_t pair_count() const { return weights_.size(); }
    bool empty() const { return weights_.empty(); }

    /// Entries sorted by weight descending, ties by pair ascending
    /// (lexicographic on the alphabetically ordered word pair).
    std::vector<std::tuple<std::string, std::string, double>> sorted_entries() const;

private:
    friend HalMatrix build_hal_matrix(const std::vector<std::string>& lemmas, int window);

    std::vector<std::string> words_;
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::unordered_map<std::uint64_t, double> weights_;
    double max_weight_ = 0.0;
};

struct FeatureConfig {
    int company_cap = 3;
    std::vector<int> hal_windows = {10};
    int hal_top_k = 20;
    double guide_sim_threshold = 0.8;
    int guide_len_tolerance = 1;
    std::vector<std::string> component_patterns;
    std::vector<std::string> guide_patterns;

    FeatureConfig();
    static FeatureConfig load(const std::filesystem::path& path);
    void validate() const;

    static std::vector<std::string> default_component_patterns();
    static std::vector<std::string> default_guide_patterns();
};

using WordPair = std::pair<std::string, std::string>; // (verb, subject)

struct SubjectPairs {
    std::set<WordPair> pairs;
    std::vector<std::string> diagnostics;
};

/// Verb/nominal-subject pair extraction behind a swappable interface so a
/// full dependency parser can be plugged in later.
class SubjectPairExtractor {
public:
    virtual ~SubjectPairExtractor() = default;
    virtual SubjectPairs extract(const std::vector<std::string>& lemmas) const = 0;
    virtual std::string describe() const = 0;
};

/// Rule-based default: every verb-candidate pairs with the nearest
/// preceding noun-candidate, using a small POS lexicon.
class PosPairExtractor final : public SubjectPairExtractor {
public:
    explicit PosPairExtractor(text::PosLexicon pos);
    SubjectPairs extract(const std::vector<std::string>& lemmas) const override;
    std::string describe() const override { return "pos-lexicon"; }

private:
    text::PosLexicon pos_;
};

// --- lexicon building ------------------------------------------------------

/// Frequencies of preprocessed help-doc words absent from the general
/// wordlist, sorted by count descending then word ascending.
std::vector<std::pair<std::string, std::size_t>> company_term_frequencies(
    const std::vector<std::string>& help_docs, const std::set<std::string>& general_wordlist,
    const text::PrepProfile& profile, const text::Lexicon& lex);

/// Top-n of company_term_frequencies as a set. Ties at rank n resolve
/// alphabetically so the result always has min(n, vocabulary) entries.
std::set<std::string> build_company_lexicon(const std::vector<std::string>& help_docs,
                                            const std::set<std::string>& general_wordlist,
                                            std::size_t top_n, const text::PrepProfile& profile,
                                            const text::Lexicon& lex,
                                            std::vector<std::string>* warnings = nullptr);

// --- individual features ---------------------------------------------------

FeatureValue company_terms_feature(const std::vector<std::string>& answer_lemmas,
                                   const std::set<std::string>& company_terms, int cap);

std::vector<Component> extract_components(std::string_view text,
                                          const std::vector<std::regex>& patterns);

FeatureValue components_defined_feature(std::string_view answer, std::string_view context_text,
                                        const std::vector<std::regex>& patterns);

FeatureValue complex_answer_feature(const std::vector<std::string>& answer_lemmas,
                                    const text::Lexicon& lex);

FeatureValue prompt_overlap_feature(const std::vector<std::string>& message_lemmas,
                                    const std::vector<std::string>& answer_lemmas,
                                    const text::Lexicon& lex);

HalMatrix build_hal_matrix(const std::vector<std::string>& lemmas, int window);

/// Single-window HAL grounding: mean over the top_k strongest answer pairs
/// of min(1, context weight / answer weight), each matrix max-normalized.
/// 0.5 when the answer has no pairs.
double hal_window_score(const std::vector<std::string>& answer_lemmas,
                        const std::vector<std::string>& context_lemmas, int window, int top_k,
                        nlohmann::json* diagnostics = nullptr);

/// Averages hal_window_score across the configured window sizes.
FeatureValue hal_feature(const std::vector<std::string>& answer_lemmas,
                         const std::vector<std::string>& context_lemmas,
                         const std::vector<int>& windows, int top_k);

SubjectPairs extract_subject_pairs(const std::vector<std::string>& lemmas,
                                   const SubjectPairExtractor& extractor);

FeatureValue subject_combination_feature(const SubjectPairs& answer_pairs,
                                         const SubjectPairs& context_pairs);

std::vector<Guide> extract_guides(std::string_view text, const std::vector<std::regex>& patterns);

/// Bag-of-lemmas term-frequency cosine between two step texts.
double step_cosine(const std::vector<std::string>& a_lemmas,
                   const std::vector<std::string>& b_lemmas);

FeatureValue verbatim_guide_feature(std::string_view answer,
                                    const std::vector<std::string>& context_blocks,
                                    const std::vector<std::regex>& guide_patterns,
                                    double sim_threshold, int len_tolerance,
                                    const text::PrepProfile& profile, const text::Lexicon& lex);

// --- composition -----------------------------------------------------------

enum class Profile { Dutch, English };

std::string to_string(Profile p);
Profile profile_from_string(const std::string& s);

/// A record to score: the original plus, in English mode, its translation.
struct ScoringInput {
    corpus::Record original;
    std::optional<corpus::Record> translated;
};

/// Immutable per-run state: lexicons, compiled patterns, pair extractors.
/// Safe to share across scoring threads.
class ExtractionContext {
public:
    ExtractionContext(const text::Lexicon& dutch, const text::Lexicon& english,
                      FeatureConfig config, Profile profile, bool include_system_prompt);

    const text::Lexicon& dutch_lexicon() const { return *dutch_; }
    const text::Lexicon& english_lexicon() const { return *english_; }
    const FeatureConfig& config() const { return config_; }
    Profile profile() const { return profile_; }
    bool include_system_prompt() const { return include_system_prompt_; }
    const std::vector<std::regex>& component_patterns() const { return component_res_; }
    const std::vector<std::regex>& guide_patterns() const { return guide_res_; }
    const SubjectPairExtractor& pair_extractor(Profile lang) const;

private:
    const text::Lexicon* dutch_;
    const text::Lexicon* english_;
    FeatureConfig config_;
    Profile profile_;
    bool include_system_prompt_;
    std::vector<std::regex> component_res_;
    std::vector<std::regex> guide_res_;
    std::unique_ptr<SubjectPairExtractor> dutch_pairs_;
    std::unique_ptr<SubjectPairExtractor> english_pairs_;
};

/// Concatenated context (doc titles + bodies, optionally the system prompt).
std::string context_text(const corpus::Record& r, bool include_system_prompt);

/// Per-document context bodies (plus system prompt); guides never span
/// document boundaries.
std::vector<std::string> context_blocks(const corpus::Record& r, bool include_system_prompt);

/// Runs all seven extractors. In English mode HAL, SubjectCombination and
/// VerbatimGuide read the translated text; the Dutch-tuned features always
/// read the original. Throws TranslationError when English mode lacks a
/// translated record.
FeatureVector extract_all(const ScoringInput& input, const ExtractionContext& ctx);

} // namespace veracity::features
