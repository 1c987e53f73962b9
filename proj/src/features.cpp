#include "veracity/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "veracity/error.hpp"
#include "veracity/util.hpp"

using nlohmann::json;

namespace veracity::features {

std::string to_string(FeatureName name) {
    switch (name) {
    case FeatureName::CompanyTerms: return "company_terms";
    case FeatureName::ComponentsDefined: return "components_defined";
    case FeatureName::ComplexAnswer: return "complex_answer";
    case FeatureName::PromptOverlap: return "prompt_overlap";
    case FeatureName::Hal: return "hal";
    case FeatureName::SubjectCombination: return "subject_combination";
    case FeatureName::VerbatimGuide: return "verbatim_guide";
    }
    return "?";
}

FeatureName feature_from_string(const std::string& s) {
    for (FeatureName f : kAllFeatures)
        if (to_string(f) == s) return f;
    throw ValidationError("unknown feature name: " + s);
}

void FeatureVector::set(FeatureValue v) {
    auto idx = static_cast<std::size_t>(v.name);
    values_[idx] = std::move(v);
}

const FeatureValue& FeatureVector::at(FeatureName name) const {
    const auto& slot = values_[static_cast<std::size_t>(name)];
    if (!slot) throw ValidationError("feature vector is missing " + to_string(name));
    return *slot;
}

bool FeatureVector::complete() const {
    return std::all_of(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); });
}

const std::optional<FeatureValue>& FeatureVector::slot(FeatureName name) const {
    return values_[static_cast<std::size_t>(name)];
}

std::string to_string(Profile p) {
    return p == Profile::Dutch ? "dutch" : "english";
}

Profile profile_from_string(const std::string& s) {
    if (s == "dutch") return Profile::Dutch;
    if (s == "english") return Profile::English;
    throw ConfigError("unknown profile: " + s);
}

// --- feature config ----------------------------------------------------------

std::vector<std::string> FeatureConfig::default_component_patterns() {
    // Help documents mark components structurally ("Klik op: Salaris");
    // capture the phrase after the trigger up to end of line or sentence.
    return {
        R"((?:klik op|ga naar|kies|selecteer|open het menu)\s*:\s*([^.\n;!?]+))",
        R"((?:click on|go to|choose|select|open the menu)\s*:\s*([^.\n;!?]+))",
    };
}

std::vector<std::string> FeatureConfig::default_guide_patterns() {
    // One pattern per numbering style; capture 1 = number, capture 2 = step.
    return {
        R"(^\s*(\d+)\s*[.)]\s*(.*)$)",
        R"(^\s*(?:stap|step)\s+(\d+)\s*[:.)]?\s*(.*)$)",
    };
}

FeatureConfig::FeatureConfig()
    : component_patterns(default_component_patterns()),
      guide_patterns(default_guide_patterns()) {}

void FeatureConfig::validate() const {
    if (company_cap < 1) throw ConfigError("company_cap must be >= 1");
    if (hal_windows.empty()) throw ConfigError("hal_windows must not be empty");
    for (int w : hal_windows)
        if (w < 1) throw ConfigError("hal window must be >= 1");
    if (hal_top_k < 1) throw ConfigError("hal_top_k must be >= 1");
    if (guide_sim_threshold <= 0.0 || guide_sim_threshold > 1.0)
        throw ConfigError("guide_sim_threshold must be in (0,1]");
    if (guide_len_tolerance < 0) throw ConfigError("guide_len_tolerance must be >= 0");
}

FeatureConfig FeatureConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open feature config: " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("feature config is not valid JSON: " + path.string());

    FeatureConfig cfg;
    cfg.company_cap = j.value("company_cap", cfg.company_cap);
    if (j.contains("hal_windows")) cfg.hal_windows = j["hal_windows"].get<std::vector<int>>();
    cfg.hal_top_k = j.value("hal_top_k", cfg.hal_top_k);
    cfg.guide_sim_threshold = j.value("sim_threshold", cfg.guide_sim_threshold);
    cfg.guide_len_tolerance = j.value("len_tolerance", cfg.guide_len_tolerance);
    if (j.contains("component_patterns"))
        cfg.component_patterns = j["component_patterns"].get<std::vector<std::string>>();
    if (j.contains("guide_patterns"))
        cfg.guide_patterns = j["guide_patterns"].get<std::vector<std::string>>();
    cfg.validate();
    return cfg;
}

// --- company lexicon ---------------------------------------------------------

namespace {

bool has_letter(const std::string& word) {
    for (std::size_t i = 0; i < word.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(word[i]);
        if (std::isalpha(c) || c >= 0x80) return true;
    }
    return false;
}

} // namespace

std::vector<std::pair<std::string, std::size_t>> company_term_frequencies(
    const std::vector<std::string>& help_docs, const std::set<std::string>& general_wordlist,
    const text::PrepProfile& profile, const text::Lexicon& lex) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& doc : help_docs)
        for (const auto& tok : text::preprocess(doc, profile, lex)) {
            if (!has_letter(tok.lemma)) continue; // numbers are not terms
            if (general_wordlist.count(tok.lemma)) continue;
            ++counts[tok.lemma];
        }

    std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return sorted;
}

std::set<std::string> build_company_lexicon(const std::vector<std::string>& help_docs,
                                            const std::set<std::string>& general_wordlist,
                                            std::size_t top_n, const text::PrepProfile& profile,
                                            const text::Lexicon& lex,
                                            std::vector<std::string>* warnings) {
    if (top_n < 1) throw ConfigError("company lexicon size must be >= 1");
    if (help_docs.empty()) {
        if (warnings) warnings->push_back("no help documents given; company lexicon is empty");
        return {};
    }
    auto freqs = company_term_frequencies(help_docs, general_wordlist, profile, lex);
    std::set<std::string> out;
    for (std::size_t i = 0; i < freqs.size() && i < top_n; ++i) out.insert(freqs[i].first);
    return out;
}

// --- company terms -----------------------------------------------------------

FeatureValue company_terms_feature(const std::vector<std::string>& answer_lemmas,
                                   const std::set<std::string>& company_terms, int cap) {
    if (cap < 1) throw ConfigError("company cap must be >= 1");
    std::set<std::string> found;
    for (const auto& lemma : answer_lemmas)
        if (company_terms.count(lemma)) found.insert(lemma);

    FeatureValue fv;
    fv.name = FeatureName::CompanyTerms;
    fv.value = std::min<double>(static_cast<double>(found.size()), cap) / cap;
    fv.diagnostics["matched"] = std::vector<std::string>(found.begin(), found.end());
    return fv;
}

// --- components defined ------------------------------------------------------

std::vector<Component> extract_components(std::string_view text,
                                          const std::vector<std::regex>& patterns) {
    std::vector<Component> out;
    std::string subject(text);
    for (const auto& re : patterns) {
        auto begin = std::sregex_iterator(subject.begin(), subject.end(), re);
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            if (it->size() < 2) continue;
            std::string captured = util::collapse_ws(util::to_lower((*it)[1].str()));
            if (!captured.empty()) out.push_back({std::move(captured)});
        }
    }
    return out;
}

FeatureValue components_defined_feature(std::string_view answer, std::string_view context_text,
                                        const std::vector<std::regex>& patterns) {
    auto components = extract_components(answer, patterns);

    std::set<std::string> distinct;
    for (const auto& c : components) distinct.insert(c.text);

    const std::string haystack = util::collapse_ws(util::to_lower(context_text));
    std::vector<std::string> undefined;
    for (const auto& c : distinct)
        if (haystack.find(c) == std::string::npos) undefined.push_back(c);

    FeatureValue fv;
    fv.name = FeatureName::ComponentsDefined;
    fv.value = undefined.empty() ? 1.0 : 0.0; // no components at all is vacuously grounded
    fv.override_signal = !undefined.empty();
    fv.diagnostics["components"] = std::vector<std::string>(distinct.begin(), distinct.end());
    fv.diagnostics["undefined"] = undefined;
    return fv;
}

// --- complex answer ----------------------------------------------------------

namespace {

std::string padded_join(const std::vector<std::string>& lemmas) {
    std::string joined = " ";
    for (const auto& l : lemmas) {
        joined += l;
        joined += ' ';
    }
    return joined;
}

} // namespace

FeatureValue complex_answer_feature(const std::vector<std::string>& answer_lemmas,
                                    const text::Lexicon& lex) {
    const std::set<std::string> lemma_set(answer_lemmas.begin(), answer_lemmas.end());
    const std::string joined = padded_join(answer_lemmas);

    std::vector<std::string> matched_lists;
    for (const char* list_name : text::kSignalListNames) {
        auto it = lex.signal_lists.find(list_name);
        if (it == lex.signal_lists.end()) continue;
        bool hit = false;
        for (const auto& entry : it->second) {
            if (entry.find(' ') == std::string::npos
                    ? lemma_set.count(entry) > 0
                    : joined.find(" " + entry + " ") != std::string::npos) {
                hit = true;
                break;
            }
        }
        if (hit) matched_lists.push_back(list_name);
    }

    FeatureValue fv;
    fv.name = FeatureName::ComplexAnswer;
    fv.value = static_cast<double>(matched_lists.size()) / 4.0;
    fv.diagnostics["matched_lists"] = matched_lists;
    return fv;
}

// --- prompt overlap ----------------------------------------------------------

FeatureValue prompt_overlap_feature(const std::vector<std::string>& message_lemmas,
                                    const std::vector<std::string>& answer_lemmas,
                                    const text::Lexicon& lex) {
    // Content words: the message side is always stopword-filtered, whatever
    // the active profile did.
    std::set<std::string> content;
    for (const auto& lemma : message_lemmas)
        if (!lex.stopwords.count(lemma)) content.insert(lemma);

    const std::set<std::string> answer_set(answer_lemmas.begin(), answer_lemmas.end());
    std::size_t overlapping = 0;
    for (const auto& w : content)
        if (answer_set.count(w)) ++overlapping;

    FeatureValue fv;
    fv.name = FeatureName::PromptOverlap;
    fv.value = content.empty() ? 0.0 : static_cast<double>(overlapping) / content.size();
    fv.diagnostics["content_words"] = content.size();
    fv.diagnostics["overlapping"] = overlapping;
    return fv;
}

// --- HAL ----------------------------------------------------------------------

double HalMatrix::weight_of(const std::string& a, const std::string& b) const {
    auto ia = ids_.find(a);
    auto ib = ids_.find(b);
    if (ia == ids_.end() || ib == ids_.end()) return 0.0;
    std::uint64_t lo = std::min(ia->second, ib->second);
    std::uint64_t hi = std::max(ia->second, ib->second);
    auto it = weights_.find((lo << 32) | hi);
    return it == weights_.end() ? 0.0 : it->second;
}

std::vector<std::tuple<std::string, std::string, double>> HalMatrix::sorted_entries() const {
    std::vector<std::tuple<std::string, std::string, double>> out;
    out.reserve(weights_.size());
    for (const auto& [key, weight] : weights_) {
        const std::string& w1 = words_[key >> 32];
        const std::string& w2 = words_[key & 0xFFFFFFFFu];
        const auto& [lo, hi] = std::minmax(w1, w2);
        out.emplace_back(lo, hi, weight);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (std::get<2>(a) != std::get<2>(b)) return std::get<2>(a) > std::get<2>(b);
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        return std::get<1>(a) < std::get<1>(b);
    });
    return out;
}

HalMatrix build_hal_matrix(const std::vector<std::string>& lemmas, int window) {
    if (window < 1) throw ConfigError("HAL window must be >= 1");

    HalMatrix m;
    m.window = window;

    std::vector<std::uint32_t> ids;
    ids.reserve(lemmas.size());
    for (const auto& lemma : lemmas) {
        auto [it, inserted] = m.ids_.emplace(lemma, static_cast<std::uint32_t>(m.words_.size()));
        if (inserted) m.words_.push_back(lemma);
        ids.push_back(it->second);
    }

    const std::size_t n = ids.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t last = std::min(n - 1, i + static_cast<std::size_t>(window));
        for (std::size_t j = i + 1; j <= last; ++j) {
            if (ids[i] == ids[j]) continue; // no self-pairs
            std::uint64_t lo = std::min(ids[i], ids[j]);
            std::uint64_t hi = std::max(ids[i], ids[j]);
            double& w = m.weights_[(lo << 32) | hi];
            w += static_cast<double>(window) - static_cast<double>(j - i) + 1.0;
            m.max_weight_ = std::max(m.max_weight_, w);
        }
    }
    return m;
}

double hal_window_score(const std::vector<std::string>& answer_lemmas,
                        const std::vector<std::string>& context_lemmas, int window, int top_k,
                        json* diagnostics) {
    if (top_k < 1) throw ConfigError("HAL top_k must be >= 1");

    HalMatrix answer = build_hal_matrix(answer_lemmas, window);
    if (answer.empty()) {
        if (diagnostics) (*diagnostics)["pairs"] = 0;
        return 0.5; // no evidence either way
    }
    HalMatrix context = build_hal_matrix(context_lemmas, window);

    const double answer_max = answer.max_weight();
    const double context_max = context.max_weight();

    auto entries = answer.sorted_entries();
    const std::size_t k = std::min<std::size_t>(entries.size(), static_cast<std::size_t>(top_k));

    double total = 0.0;
    std::size_t grounded = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const auto& [a, b, weight] = entries[i];
        const double answer_norm = weight / answer_max;
        const double context_norm =
            context_max > 0.0 ? context.weight_of(a, b) / context_max : 0.0;
        const double g = std::min(1.0, context_norm / answer_norm);
        total += g;
        if (g >= 1.0) ++grounded;
    }
    if (diagnostics) {
        (*diagnostics)["pairs"] = answer.pair_count();
        (*diagnostics)["considered"] = k;
        (*diagnostics)["fully_grounded"] = grounded;
    }
    return total / static_cast<double>(k);
}

FeatureValue hal_feature(const std::vector<std::string>& answer_lemmas,
                         const std::vector<std::string>& context_lemmas,
                         const std::vector<int>& windows, int top_k) {
    if (windows.empty()) throw ConfigError("HAL needs at least one window size");

    FeatureValue fv;
    fv.name = FeatureName::Hal;
    json per_window = json::object();
    double total = 0.0;
    for (int w : windows) {
        json diag;
        double score = hal_window_score(answer_lemmas, context_lemmas, w, top_k, &diag);
        per_window[std::to_string(w)] = score;
        total += score;
    }
    fv.value = total / static_cast<double>(windows.size());
    fv.diagnostics["per_window"] = per_window;
    return fv;
}

// --- subject pairs -----------------------------------------------------------

PosPairExtractor::PosPairExtractor(text::PosLexicon pos) : pos_(std::move(pos)) {}

SubjectPairs PosPairExtractor::extract(const std::vector<std::string>& lemmas) const {
    SubjectPairs out;
    for (std::size_t i = 0; i < lemmas.size(); ++i) {
        if (!pos_.verbs.count(lemmas[i])) continue;
        for (std::size_t j = i; j-- > 0;) {
            if (pos_.nouns.count(lemmas[j])) {
                out.pairs.insert({lemmas[i], lemmas[j]});
                break;
            }
        }
    }
    return out;
}

SubjectPairs extract_subject_pairs(const std::vector<std::string>& lemmas,
                                   const SubjectPairExtractor& extractor) {
    return extractor.extract(lemmas);
}

FeatureValue subject_combination_feature(const SubjectPairs& answer_pairs,
                                         const SubjectPairs& context_pairs) {
    FeatureValue fv;
    fv.name = FeatureName::SubjectCombination;
    fv.diagnostics["answer_pairs"] = answer_pairs.pairs.size();
    if (!answer_pairs.diagnostics.empty()) fv.diagnostics["notes"] = answer_pairs.diagnostics;

    if (answer_pairs.pairs.empty()) {
        fv.value = 0.5; // no evidence either way
        return fv;
    }
    std::size_t present = 0;
    for (const auto& p : answer_pairs.pairs)
        if (context_pairs.pairs.count(p)) ++present;
    fv.value = static_cast<double>(present) / static_cast<double>(answer_pairs.pairs.size());
    fv.diagnostics["grounded_pairs"] = present;
    return fv;
}

// --- guides -------------------------------------------------------------------

std::vector<Guide> extract_guides(std::string_view text, const std::vector<std::regex>& patterns) {
    std::vector<Guide> guides;
    Guide current;
    long last_number = 0;

    auto flush = [&] {
        if (current.steps.size() >= 2) guides.push_back(current); // one line is not a guide
        current.steps.clear();
        last_number = 0;
    };

    for (const auto& raw_line : util::split_lines(text)) {
        const std::string line = util::trim(raw_line);
        if (line.empty()) continue; // blank lines do not break a run

        bool numbered = false;
        long number = 0;
        std::string step;
        for (const auto& re : patterns) {
            std::smatch m;
            if (std::regex_match(line, m, re) && m.size() >= 3) {
                numbered = true;
                number = std::stol(m[1].str());
                step = util::trim(m[2].str());
                break;
            }
        }

        if (!numbered) {
            flush();
            continue;
        }
        // a number that does not increase starts a fresh guide
        if (!current.steps.empty() && number <= last_number) flush();
        current.steps.push_back(step);
        last_number = number;
    }
    flush();
    return guides;
}

double step_cosine(const std::vector<std::string>& a_lemmas,
                   const std::vector<std::string>& b_lemmas) {
    if (a_lemmas.empty() && b_lemmas.empty()) return 1.0;
    if (a_lemmas.empty() || b_lemmas.empty()) return 0.0;

    std::map<std::string, double> ta, tb;
    for (const auto& l : a_lemmas) ++ta[l];
    for (const auto& l : b_lemmas) ++tb[l];

    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [w, c] : ta) {
        na += c * c;
        auto it = tb.find(w);
        if (it != tb.end()) dot += c * it->second;
    }
    for (const auto& [w, c] : tb) nb += c * c;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

FeatureValue verbatim_guide_feature(std::string_view answer,
                                    const std::vector<std::string>& context_blocks,
                                    const std::vector<std::regex>& guide_patterns,
                                    double sim_threshold, int len_tolerance,
                                    const text::PrepProfile& profile, const text::Lexicon& lex) {
    FeatureValue fv;
    fv.name = FeatureName::VerbatimGuide;

    const auto answer_guides = extract_guides(answer, guide_patterns);
    fv.diagnostics["answer_guides"] = answer_guides.size();
    if (answer_guides.empty()) {
        fv.value = 0.0;
        return fv;
    }

    std::vector<Guide> context_guides;
    for (const auto& block : context_blocks)
        for (auto& g : extract_guides(block, guide_patterns)) context_guides.push_back(std::move(g));
    fv.diagnostics["context_guides"] = context_guides.size();

    auto step_bags = [&](const Guide& g) {
        std::vector<std::vector<std::string>> bags;
        bags.reserve(g.steps.size());
        for (const auto& s : g.steps) bags.push_back(text::lemmas(text::preprocess(s, profile, lex)));
        return bags;
    };

    for (std::size_t ai = 0; ai < answer_guides.size(); ++ai) {
        const auto a_bags = step_bags(answer_guides[ai]);
        for (std::size_t ci = 0; ci < context_guides.size(); ++ci) {
            const auto& cg = context_guides[ci];
            const long diff = static_cast<long>(a_bags.size()) - static_cast<long>(cg.steps.size());
            if (std::labs(diff) > len_tolerance) continue;

            const auto c_bags = step_bags(cg);
            const std::size_t aligned = std::min(a_bags.size(), c_bags.size());
            double min_cos = 1.0;
            bool all_similar = true;
            for (std::size_t s = 0; s < aligned && all_similar; ++s) {
                double cos = step_cosine(a_bags[s], c_bags[s]);
                min_cos = std::min(min_cos, cos);
                if (cos < sim_threshold) all_similar = false;
            }
            if (all_similar) {
                fv.value = 1.0;
                fv.override_signal = true;
                fv.diagnostics["matched"] = true;
                fv.diagnostics["answer_guide"] = ai;
                fv.diagnostics["context_guide"] = ci;
                fv.diagnostics["min_step_cosine"] = min_cos;
                return fv;
            }
        }
    }
    fv.value = 0.0;
    fv.diagnostics["matched"] = false;
    return fv;
}

// --- composition ---------------------------------------------------------------

namespace {

std::vector<std::regex> compile_patterns(const std::vector<std::string>& patterns,
                                         const char* what) {
    std::vector<std::regex> out;
    out.reserve(patterns.size());
    for (const auto& p : patterns) {
        try {
            out.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            throw ConfigError(std::string("invalid ") + what + " pattern '" + p + "': " + e.what());
        }
    }
    return out;
}

} // namespace

ExtractionContext::ExtractionContext(const text::Lexicon& dutch, const text::Lexicon& english,
                                     FeatureConfig config, Profile profile,
                                     bool include_system_prompt)
    : dutch_(&dutch),
      english_(&english),
      config_(std::move(config)),
      profile_(profile),
      include_system_prompt_(include_system_prompt),
      component_res_(compile_patterns(config_.component_patterns, "component")),
      guide_res_(compile_patterns(config_.guide_patterns, "guide")),
      dutch_pairs_(std::make_unique<PosPairExtractor>(dutch.pos)),
      english_pairs_(std::make_unique<PosPairExtractor>(english.pos)) {
    config_.validate();
}

const SubjectPairExtractor& ExtractionContext::pair_extractor(Profile lang) const {
    return lang == Profile::Dutch ? *dutch_pairs_ : *english_pairs_;
}

std::string context_text(const corpus::Record& r, bool include_system_prompt) {
    std::string out;
    for (const auto& doc : r.context) {
        if (!doc.title.empty()) {
            out += doc.title;
            out += '\n';
        }
        out += doc.body;
        out += '\n';
    }
    if (include_system_prompt && r.system_prompt) {
        out += *r.system_prompt;
        out += '\n';
    }
    return out;
}

std::vector<std::string> context_blocks(const corpus::Record& r, bool include_system_prompt) {
    std::vector<std::string> blocks;
    blocks.reserve(r.context.size() + 1);
    for (const auto& doc : r.context) blocks.push_back(doc.body);
    if (include_system_prompt && r.system_prompt) blocks.push_back(*r.system_prompt);
    return blocks;
}

FeatureVector extract_all(const ScoringInput& input, const ExtractionContext& ctx) {
    const corpus::Record& original = input.original;

    // Dutch-tuned features always read the original record.
    const text::PrepProfile& dutch_profile = text::PrepProfile::dutch();
    const text::Lexicon& dutch_lex = ctx.dutch_lexicon();

    // HAL, SubjectCombination and VerbatimGuide follow the active profile.
    const corpus::Record* routed = &original;
    const text::PrepProfile* routed_profile = &dutch_profile;
    const text::Lexicon* routed_lex = &dutch_lex;
    Profile routed_lang = Profile::Dutch;

    if (ctx.profile() == Profile::English) {
        if (original.language == corpus::Language::English) {
            routed = &original;
        } else if (input.translated &&
                   input.translated->language == corpus::Language::English) {
            routed = &*input.translated;
        } else {
            throw TranslationError("record " + original.id +
                                   ": english profile requires a translated record");
        }
        routed_profile = &text::PrepProfile::english();
        routed_lex = &ctx.english_lexicon();
        routed_lang = Profile::English;
    }

    const bool with_prompt = ctx.include_system_prompt();
    const auto answer_nl = text::lemmas(text::preprocess(original.answer, dutch_profile, dutch_lex));
    const auto message_nl =
        text::lemmas(text::preprocess(original.message, dutch_profile, dutch_lex));
    const std::string context_nl = context_text(original, with_prompt);

    const auto answer_routed =
        text::lemmas(text::preprocess(routed->answer, *routed_profile, *routed_lex));
    const std::string routed_context = context_text(*routed, with_prompt);
    const auto context_routed =
        text::lemmas(text::preprocess(routed_context, *routed_profile, *routed_lex));

    FeatureVector fv;
    fv.set(company_terms_feature(answer_nl, dutch_lex.company_terms, ctx.config().company_cap));
    fv.set(components_defined_feature(original.answer, context_nl, ctx.component_patterns()));
    fv.set(complex_answer_feature(answer_nl, dutch_lex));
    fv.set(prompt_overlap_feature(message_nl, answer_nl, dutch_lex));
    fv.set(hal_feature(answer_routed, context_routed, ctx.config().hal_windows,
                       ctx.config().hal_top_k));

    const auto& extractor = ctx.pair_extractor(routed_lang);
    fv.set(subject_combination_feature(extract_subject_pairs(answer_routed, extractor),
                                       extract_subject_pairs(context_routed, extractor)));

    fv.set(verbatim_guide_feature(routed->answer, context_blocks(*routed, with_prompt),
                                  ctx.guide_patterns(), ctx.config().guide_sim_threshold,
                                  ctx.config().guide_len_tolerance, *routed_profile, *routed_lex));
    return fv;
}

} // namespace veracity::features
