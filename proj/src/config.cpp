#include "veracity/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "veracity/error.hpp"

using nlohmann::json;

namespace veracity::cli {

AppConfig AppConfig::defaults() {
    AppConfig cfg;
    cfg.base_dir = std::filesystem::current_path();
    return cfg;
}

namespace {

void read_lexicon_paths(const json& j, LexiconPaths& out) {
    out.stopwords = j.value("stopwords", out.stopwords);
    out.lemma_table = j.value("lemma_table", out.lemma_table);
    out.signal_perspective = j.value("signal_perspective", out.signal_perspective);
    out.signal_comparison = j.value("signal_comparison", out.signal_comparison);
    out.signal_examples = j.value("signal_examples", out.signal_examples);
    out.signal_reasoning = j.value("signal_reasoning", out.signal_reasoning);
    out.general_wordlist = j.value("general_wordlist", out.general_wordlist);
    out.company_terms = j.value("company_terms", out.company_terms);
    out.pos_lexicon = j.value("pos_lexicon", out.pos_lexicon);
}

} // namespace

AppConfig AppConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());

    AppConfig cfg;
    cfg.base_dir = std::filesystem::absolute(path).parent_path();

    if (j.contains("profile")) cfg.profile = features::profile_from_string(j["profile"]);
    cfg.threshold = j.value("threshold", cfg.threshold);
    cfg.margin = j.value("margin", cfg.margin);
    cfg.include_system_prompt =
        j.value("include_system_prompt_in_context", cfg.include_system_prompt);

    if (j.contains("paths")) {
        const json& paths = j["paths"];
        cfg.rules_file = paths.value("rules", cfg.rules_file);
        cfg.feature_config_file = paths.value("feature_config", cfg.feature_config_file);
        cfg.translation_cache = paths.value("translation_cache", cfg.translation_cache);
        if (paths.contains("dutch")) read_lexicon_paths(paths["dutch"], cfg.dutch);
        if (paths.contains("english")) read_lexicon_paths(paths["english"], cfg.english);
    }

    if (j.contains("translation")) {
        const json& t = j["translation"];
        cfg.translation.enabled = t.value("enabled", cfg.translation.enabled);
        cfg.translation.endpoint = t.value("endpoint", cfg.translation.endpoint);
        cfg.translation.timeout_ms = t.value("timeout_ms", cfg.translation.timeout_ms);
        cfg.translation.retries = t.value("retries", cfg.translation.retries);
    }

    if (!cfg.feature_config_file.empty())
        cfg.feature_config = features::FeatureConfig::load(cfg.resolve(cfg.feature_config_file));
    return cfg;
}

std::filesystem::path AppConfig::resolve(const std::string& p) const {
    std::filesystem::path fp(p);
    if (fp.is_absolute()) return fp;
    return base_dir / fp;
}

std::string AppConfig::resolved_endpoint() const {
    const std::string& endpoint = translation.endpoint;
    if (endpoint.rfind("stub:", 0) == 0)
        return "stub:" + resolve(endpoint.substr(5)).string();
    return endpoint;
}

text::Lexicon AppConfig::load_lexicon(const LexiconPaths& paths) const {
    text::Lexicon lex;
    if (!paths.stopwords.empty()) lex.stopwords = text::load_wordlist(resolve(paths.stopwords));
    if (!paths.lemma_table.empty())
        lex.lemma_table = text::load_lemma_table(resolve(paths.lemma_table));
    if (!paths.general_wordlist.empty())
        lex.general_wordlist = text::load_wordlist(resolve(paths.general_wordlist));
    if (!paths.company_terms.empty())
        lex.company_terms = text::load_wordlist(resolve(paths.company_terms));
    if (!paths.pos_lexicon.empty()) lex.pos = text::load_pos_lexicon(resolve(paths.pos_lexicon));

    const std::pair<const char*, const std::string*> signals[] = {
        {"perspective", &paths.signal_perspective},
        {"comparison", &paths.signal_comparison},
        {"examples", &paths.signal_examples},
        {"reasoning", &paths.signal_reasoning},
    };
    for (const auto& [name, p] : signals)
        if (!p->empty()) lex.signal_lists[name] = text::load_phrase_list(resolve(*p));
    return lex;
}

classify::TypeRules AppConfig::load_rules() const {
    if (rules_file.empty()) return classify::TypeRules::defaults();
    return classify::TypeRules::load(resolve(rules_file));
}

} // namespace veracity::cli
