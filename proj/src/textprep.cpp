#include "veracity/textprep.hpp"

#include <algorithm>
#include <fstream>

#include "veracity/error.hpp"
#include "veracity/util.hpp"

namespace veracity::text {

bool Tokenization::has_question_mark() const {
    for (const auto& sep : separators)
        if (sep.text.find('?') != std::string::npos) return true;
    return false;
}

const PrepProfile& PrepProfile::dutch() {
    static const PrepProfile p{"dutch", true, true, false};
    return p;
}

const PrepProfile& PrepProfile::english() {
    static const PrepProfile p{"english", true, true, true};
    return p;
}

const PrepProfile& PrepProfile::by_name(const std::string& name) {
    if (name == "dutch") return dutch();
    if (name == "english") return english();
    throw ConfigError("unknown preprocessing profile: " + name);
}

namespace {

bool is_space_byte(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Byte length of the whitespace sequence at `i`, 0 when text[i] starts a
// non-space. Covers ASCII plus the common Unicode space code points.
std::size_t space_len(std::string_view text, std::size_t i) {
    const unsigned char c0 = static_cast<unsigned char>(text[i]);
    if (is_space_byte(c0)) return 1;
    auto b = [&](std::size_t off) {
        return i + off < text.size() ? static_cast<unsigned char>(text[i + off]) : 0;
    };
    if (c0 == 0xC2 && b(1) == 0xA0) return 2;                    // NBSP
    if (c0 == 0xE1 && b(1) == 0x9A && b(2) == 0x80) return 3;     // ogham space
    if (c0 == 0xE2 && b(1) == 0x80) {
        const unsigned char c2 = b(2);
        if ((c2 >= 0x80 && c2 <= 0x8A) || c2 == 0xA8 || c2 == 0xA9 || c2 == 0xAF)
            return 3; // en/em spaces, line/para separators, narrow NBSP
    }
    if (c0 == 0xE2 && b(1) == 0x81 && b(2) == 0x9F) return 3;     // math space
    if (c0 == 0xE3 && b(1) == 0x80 && b(2) == 0x80) return 3;     // ideographic space
    return 0;
}

bool is_ascii_punct(unsigned char c) {
    return c < 0x80 && std::ispunct(c);
}

// Multi-byte punctuation commonly produced by chat UIs and help documents.
const std::vector<std::string>& multibyte_punct() {
    static const std::vector<std::string> p = {
        "‘", "’", "“", "”", "«", "»",
        "–", "—", "…", "¡", "¿",
    };
    return p;
}

// Strips one punctuation unit from the front (or back) of the chunk.
// Returns the stripped text, empty when the boundary is not punctuation.
std::string strip_punct(std::string& chunk, bool front) {
    if (chunk.empty()) return {};
    if (front ? is_ascii_punct(chunk.front()) : is_ascii_punct(chunk.back())) {
        std::string out(1, front ? chunk.front() : chunk.back());
        if (front)
            chunk.erase(chunk.begin());
        else
            chunk.pop_back();
        return out;
    }
    for (const auto& p : multibyte_punct()) {
        if (chunk.size() < p.size()) continue;
        if (front ? chunk.compare(0, p.size(), p) == 0
                  : chunk.compare(chunk.size() - p.size(), p.size(), p) == 0) {
            std::string out = p;
            if (front)
                chunk.erase(0, p.size());
            else
                chunk.erase(chunk.size() - p.size());
            return out;
        }
    }
    return {};
}

bool contains_sentence_final(const std::string& s) {
    return s.find_first_of(".!?") != std::string::npos ||
           s.find("…") != std::string::npos;
}

} // namespace

Tokenization tokenize(std::string_view text) {
    Tokenization result;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (std::size_t ws = space_len(text, i); ws > 0) {
            i += ws;
            continue;
        }
        std::size_t start = i;
        while (i < n && space_len(text, i) == 0) ++i;
        std::string chunk(text.substr(start, i - start));

        std::string leading, trailing;
        for (std::string s = strip_punct(chunk, true); !s.empty(); s = strip_punct(chunk, true))
            leading += s;
        for (std::string s = strip_punct(chunk, false); !s.empty(); s = strip_punct(chunk, false))
            trailing = s + trailing;

        if (!leading.empty())
            result.separators.push_back(
                {leading, result.tokens.size(), contains_sentence_final(leading)});
        if (!chunk.empty()) {
            Token t;
            t.surface = chunk;
            t.lemma = util::to_lower(chunk);
            t.position = result.tokens.size();
            result.tokens.push_back(std::move(t));
        }
        if (!trailing.empty())
            result.separators.push_back(
                {trailing, result.tokens.size(), contains_sentence_final(trailing)});
    }
    return result;
}

std::vector<Token> apply_profile(std::vector<Token> tokens, const PrepProfile& profile,
                                 const Lexicon& lex) {
    for (auto& t : tokens) {
        std::string base = profile.lowercase ? util::to_lower(t.surface) : t.surface;
        std::string lemma = base;
        if (profile.lemmatize) {
            auto it = lex.lemma_table.find(base);
            if (it != lex.lemma_table.end()) lemma = it->second;
        }
        t.lemma = std::move(lemma);
    }
    if (profile.strip_stopwords) {
        std::erase_if(tokens, [&](const Token& t) { return lex.stopwords.count(t.lemma) > 0; });
    }
    return tokens;
}

std::vector<Token> preprocess(std::string_view text, const PrepProfile& profile,
                              const Lexicon& lex) {
    return apply_profile(tokenize(text).tokens, profile, lex);
}

std::vector<std::string> lemmas(const std::vector<Token>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.lemma);
    return out;
}

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lexicon file: " + path.string());
    return in;
}

} // namespace

std::set<std::string> load_wordlist(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        std::string w = util::to_lower(util::trim(line));
        if (!w.empty() && w[0] != '#') words.insert(std::move(w));
    }
    return words;
}

std::vector<std::string> load_phrase_list(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    std::vector<std::string> phrases;
    std::string line;
    while (std::getline(in, line)) {
        std::string p = util::to_lower(util::collapse_ws(line));
        if (!p.empty() && p[0] != '#') phrases.push_back(std::move(p));
    }
    return phrases;
}

std::unordered_map<std::string, std::string> load_lemma_table(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    std::unordered_map<std::string, std::string> table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ValidationError("lemma table " + path.string() + " line " +
                                  std::to_string(line_no) + ": expected TAB-separated pair");
        std::string surface = util::to_lower(util::trim(line.substr(0, tab)));
        std::string lemma = util::to_lower(util::trim(line.substr(tab + 1)));
        if (surface.empty() || lemma.empty())
            throw ValidationError("lemma table " + path.string() + " line " +
                                  std::to_string(line_no) + ": empty entry");
        table[surface] = lemma;
    }

    // Resolve chains (a->b, b->c becomes a->c) so lemmatization is a
    // fixpoint and the preprocessing pipeline stays idempotent. Cycles are
    // collapsed onto their lexicographically smallest member.
    for (auto& [surface, lemma] : table) {
        std::vector<std::string> chain{surface};
        std::string current = lemma;
        while (true) {
            if (std::find(chain.begin(), chain.end(), current) != chain.end()) {
                chain.push_back(current);
                current = *std::min_element(chain.begin(), chain.end());
                break;
            }
            auto it = table.find(current);
            if (it == table.end() || it->second == current) break;
            chain.push_back(current);
            current = it->second;
        }
        lemma = current;
    }
    return table;
}

PosLexicon load_pos_lexicon(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    PosLexicon pos;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ValidationError("POS lexicon " + path.string() + " line " +
                                  std::to_string(line_no) + ": expected word TAB pos");
        std::string word = util::to_lower(util::trim(line.substr(0, tab)));
        std::string tag = util::to_lower(util::trim(line.substr(tab + 1)));
        if (tag == "noun" || tag == "n")
            pos.nouns.insert(word);
        else if (tag == "verb" || tag == "v")
            pos.verbs.insert(word);
        else
            throw ValidationError("POS lexicon " + path.string() + " line " +
                                  std::to_string(line_no) + ": unknown tag '" + tag + "'");
    }
    return pos;
}

} // namespace veracity::text
