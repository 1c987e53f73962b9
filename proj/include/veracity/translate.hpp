#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "veracity/corpus.hpp"

namespace veracity::text {

struct LangPair {
    std::string source;
    std::string target;
};

class TranslationClient {
public:
    virtual ~TranslationClient() = default;
    /// Throws TranslationError on failure.
    virtual std::string translate(const LangPair& langs, const std::string& text) = 0;
    virtual std::string describe() const = 0;
};

/// Deterministic file-backed stub: word-by-word lookup in a TAB-separated
/// mapping file; unmapped words pass through unchanged.
class StubTranslationClient : public TranslationClient {
public:
    explicit StubTranslationClient(const std::filesystem::path& mapping_file);
    explicit StubTranslationClient(std::map<std::string, std::string> mapping);

    std::string translate(const LangPair& langs, const std::string& text) override;
    std::string describe() const override;

private:
    std::map<std::string, std::string> mapping_;
};

/// POSTs {source_lang, target_lang, text} and expects {text} back.
class HttpTranslationClient : public TranslationClient {
public:
    HttpTranslationClient(std::string endpoint, int timeout_ms, int retries);

    std::string translate(const LangPair& langs, const std::string& text) override;
    std::string describe() const override;

private:
    std::string endpoint_;
    int timeout_ms_;
    int retries_;
};

/// Parses an endpoint spec: "stub:<path>" yields the file-backed stub,
/// anything starting with http:// or https:// the HTTP client.
std::unique_ptr<TranslationClient> make_translation_client(const std::string& endpoint,
                                                           int timeout_ms, int retries);

/// Persistent translation cache, line-delimited {key, source, translated}.
/// Single writer, many readers.
class TranslationCache {
public:
    explicit TranslationCache(std::filesystem::path path);

    static std::string key_for(const LangPair& langs, const std::string& text);

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& source, const std::string& translated);
    std::size_t size() const;

private:
    std::filesystem::path path_;
    std::map<std::string, std::string> entries_;
    mutable std::mutex mutex_;
};

/// Returns a translated copy of the record (message, answer, context bodies,
/// system prompt) with language set to English. The cache is consulted first
/// and updated on miss. The input record is never modified and a partially
/// translated record is never returned.
corpus::Record translate_record(const corpus::Record& r, TranslationClient& client,
                                TranslationCache& cache);

} // namespace veracity::text
