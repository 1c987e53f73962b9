#include "veracity/translate.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "veracity/error.hpp"
#include "veracity/textprep.hpp"
#include "veracity/util.hpp"

using nlohmann::json;

namespace veracity::text {

StubTranslationClient::StubTranslationClient(const std::filesystem::path& mapping_file) {
    std::ifstream in(mapping_file);
    if (!in) throw IoError("cannot open translation stub mapping: " + mapping_file.string());
    std::string line;
    while (std::getline(in, line)) {
        if (util::trim(line).empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        mapping_[util::to_lower(util::trim(line.substr(0, tab)))] =
            util::trim(line.substr(tab + 1));
    }
}

StubTranslationClient::StubTranslationClient(std::map<std::string, std::string> mapping)
    : mapping_(std::move(mapping)) {}

std::string StubTranslationClient::translate(const LangPair&, const std::string& text) {
    // Word-by-word substitution; whitespace and punctuation survive so the
    // output keeps the source structure (numbered guide lines in particular).
    std::ostringstream out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
            out << text[i];
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::string word = text.substr(start, i - start);
        // peel punctuation so "belasting." maps via "belasting"
        std::string prefix, suffix;
        while (!word.empty() && std::ispunct(static_cast<unsigned char>(word.front()))) {
            prefix += word.front();
            word.erase(word.begin());
        }
        while (!word.empty() && std::ispunct(static_cast<unsigned char>(word.back()))) {
            suffix.insert(suffix.begin(), word.back());
            word.pop_back();
        }
        auto it = mapping_.find(util::to_lower(word));
        out << prefix << (it != mapping_.end() ? it->second : word) << suffix;
    }
    return out.str();
}

std::string StubTranslationClient::describe() const {
    return "stub(" + std::to_string(mapping_.size()) + " entries)";
}

HttpTranslationClient::HttpTranslationClient(std::string endpoint, int timeout_ms, int retries)
    : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms), retries_(retries) {}

std::string HttpTranslationClient::translate(const LangPair& langs, const std::string& text) {
    // endpoint is host[:port]/path
    auto scheme_end = endpoint_.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("translation endpoint missing scheme: " + endpoint_);
    auto path_start = endpoint_.find('/', scheme_end + 3);
    std::string host = endpoint_.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : endpoint_.substr(path_start);

    json body = {{"source_lang", langs.source}, {"target_lang", langs.target}, {"text", text}};
    std::string last_error;
    for (int attempt = 0; attempt <= retries_; ++attempt) {
        httplib::Client client(host);
        client.set_connection_timeout(0, timeout_ms_ * 1000);
        client.set_read_timeout(0, timeout_ms_ * 1000);
        auto res = client.Post(path, body.dump(), "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("text"))
            throw TranslationError("malformed translation response from " + endpoint_);
        return parsed["text"].get<std::string>();
    }
    throw TranslationError("translation request failed after " + std::to_string(retries_ + 1) +
                           " attempts: " + last_error);
}

std::string HttpTranslationClient::describe() const {
    return "http(" + endpoint_ + ")";
}

std::unique_ptr<TranslationClient> make_translation_client(const std::string& endpoint,
                                                           int timeout_ms, int retries) {
    if (endpoint.rfind("stub:", 0) == 0)
        return std::make_unique<StubTranslationClient>(std::filesystem::path(endpoint.substr(5)));
    if (endpoint.rfind("http://", 0) == 0 || endpoint.rfind("https://", 0) == 0)
        return std::make_unique<HttpTranslationClient>(endpoint, timeout_ms, retries);
    throw ConfigError("unsupported translation endpoint: " + endpoint);
}

TranslationCache::TranslationCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return; // cold cache
    std::string line;
    while (std::getline(in, line)) {
        if (util::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("key") || !j.contains("translated")) continue;
        entries_[j["key"].get<std::string>()] = j["translated"].get<std::string>();
    }
}

std::string TranslationCache::key_for(const LangPair& langs, const std::string& text) {
    return langs.source + "-" + langs.target + ":" + util::sha256_hex(text);
}

std::optional<std::string> TranslationCache::get(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void TranslationCache::put(const std::string& key, const std::string& source,
                           const std::string& translated) {
    std::lock_guard lock(mutex_);
    if (!entries_.emplace(key, translated).second) return;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw IoError("cannot append to translation cache: " + path_.string());
    out << json{{"key", key}, {"source", source}, {"translated", translated}}.dump() << '\n';
}

std::size_t TranslationCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

namespace {

std::string translate_field(const std::string& text, const std::string& record_id,
                            const std::string& field, TranslationClient& client,
                            TranslationCache& cache) {
    const LangPair langs{"nl", "en"};
    std::string key = TranslationCache::key_for(langs, text);
    if (auto hit = cache.get(key)) return *hit;
    std::string translated;
    try {
        translated = client.translate(langs, text);
    } catch (const Error& e) {
        throw TranslationError("record " + record_id + ", field '" + field +
                               "': " + e.what());
    }
    cache.put(key, text, translated);
    return translated;
}

} // namespace

corpus::Record translate_record(const corpus::Record& r, TranslationClient& client,
                                TranslationCache& cache) {
    if (r.language != corpus::Language::Dutch)
        throw ValidationError("record " + r.id + " is not Dutch; nothing to translate");

    corpus::Record out = r;
    out.message = translate_field(r.message, r.id, "message", client, cache);
    out.answer = translate_field(r.answer, r.id, "answer", client, cache);
    for (std::size_t i = 0; i < r.context.size(); ++i) {
        out.context[i].body = translate_field(
            r.context[i].body, r.id, "context[" + r.context[i].id + "].body", client, cache);
    }
    if (r.system_prompt)
        out.system_prompt = translate_field(*r.system_prompt, r.id, "system_prompt", client, cache);
    out.language = corpus::Language::English;
    return out;
}

} // namespace veracity::text
