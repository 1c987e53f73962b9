#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace veracity::text {

struct Token {
    std::string surface;
    std::string lemma;     // lowercased surface when no lemma-table entry exists
    std::size_t position;  // token index in the source text, survives filtering
};

/// Punctuation stripped off a token boundary. `position` is the number of
/// tokens emitted before the separator occurred, so a separator sits between
/// token[position-1] and token[position].
struct Separator {
    std::string text;
    std::size_t position;
    bool sentence_final; // contains . ! or ?
};

struct Tokenization {
    std::vector<Token> tokens;
    std::vector<Separator> separators;

    bool has_question_mark() const;
};

struct PrepProfile {
    std::string name;
    bool lowercase = true;
    bool lemmatize = true;
    bool strip_stopwords = false;

    static const PrepProfile& dutch();   // lowercase + lemmatize
    static const PrepProfile& english(); // lowercase + lemmatize + stopword strip
    static const PrepProfile& by_name(const std::string& name);
};

struct PosLexicon {
    std::set<std::string> nouns;
    std::set<std::string> verbs;
};

/// Names of the four complexity signal-word lists, in canonical order.
inline constexpr const char* kSignalListNames[4] = {
    "perspective", "comparison", "examples", "reasoning"};

/// Immutable word collections backing preprocessing and feature extraction.
/// All entries are lowercased at load time.
struct Lexicon {
    std::set<std::string> stopwords;
    std::unordered_map<std::string, std::string> lemma_table;
    // keyed by kSignalListNames; entries may be multi-word phrases
    std::unordered_map<std::string, std::vector<std::string>> signal_lists;
    std::set<std::string> general_wordlist;
    std::set<std::string> company_terms;
    PosLexicon pos;
};

/// Splits on whitespace and strips leading/trailing punctuation into
/// discarded separators. Digits are kept; internal punctuation ("e-mail")
/// is left alone. Never emits empty tokens.
Tokenization tokenize(std::string_view text);

/// Applies the profile steps in fixed order: lowercase, lemmatize,
/// stopword-strip. Pure function of the token surfaces.
std::vector<Token> apply_profile(std::vector<Token> tokens, const PrepProfile& profile,
                                 const Lexicon& lex);

std::vector<Token> preprocess(std::string_view text, const PrepProfile& profile,
                              const Lexicon& lex);

std::vector<std::string> lemmas(const std::vector<Token>& tokens);

// Lexicon file loaders. One word per line for word lists; TAB-separated
// surface/lemma pairs for the lemma table; word TAB pos (noun|verb) for the
// POS lexicon.
std::set<std::string> load_wordlist(const std::filesystem::path& path);
std::vector<std::string> load_phrase_list(const std::filesystem::path& path);
std::unordered_map<std::string, std::string> load_lemma_table(const std::filesystem::path& path);
PosLexicon load_pos_lexicon(const std::filesystem::path& path);

} // namespace veracity::text
