#include <doctest.h>

#include <map>
#include <random>

#include "veracity/error.hpp"
#include "veracity/features.hpp"

using namespace veracity;
using features::FeatureName;

namespace {

text::Lexicon feature_lexicon() {
    text::Lexicon lex;
    lex.stopwords = {"de", "het", "een", "is", "in", "op", "te", "u", "the", "a", "an", "and"};
    lex.lemma_table = {{"receives", "receive"}, {"opens", "open"},       {"changes", "change"},
                       {"shows", "show"},       {"rekeningen", "rekening"}};
    lex.signal_lists["perspective"] = {"volgens", "standpunt"};
    lex.signal_lists["comparison"] = {"vergeleken", "in vergelijking met"};
    lex.signal_lists["examples"] = {"bijvoorbeeld", "zoals"};
    lex.signal_lists["reasoning"] = {"omdat", "daarom"};
    lex.company_terms = {"profitanalyzer", "loonportaal", "salaristab"};
    lex.pos.nouns = {"employee", "payslip", "manager", "menu", "overview", "rate", "button", "tax"};
    lex.pos.verbs = {"receive", "open", "click", "change", "confirm", "show"};
    return lex;
}

std::vector<std::string> lemmas_of(const std::string& s, const text::Lexicon& lex) {
    return text::lemmas(text::preprocess(s, text::PrepProfile::dutch(), lex));
}

std::vector<std::regex> default_component_res() {
    std::vector<std::regex> out;
    for (const auto& p : features::FeatureConfig::default_component_patterns())
        out.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
    return out;
}

std::vector<std::regex> default_guide_res() {
    std::vector<std::regex> out;
    for (const auto& p : features::FeatureConfig::default_guide_patterns())
        out.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
    return out;
}

} // namespace

TEST_CASE("company lexicon excludes general words and cuts ties alphabetically") {
    auto lex = text::Lexicon{};
    std::vector<std::string> docs = {"alpha alpha beta beta ceta delta",
                                     "gewoon gewoon gewoon gewoon"};
    std::set<std::string> general = {"gewoon"};

    auto top3 = features::build_company_lexicon(docs, general, 3, text::PrepProfile::dutch(), lex);
    CHECK(top3 == std::set<std::string>{"alpha", "beta", "ceta"}); // tie ceta/delta cut by name
    CHECK(top3.count("gewoon") == 0);

    auto all = features::build_company_lexicon(docs, general, 100, text::PrepProfile::dutch(), lex);
    CHECK(all == std::set<std::string>{"alpha", "beta", "ceta", "delta"});

    std::vector<std::string> warnings;
    auto empty =
        features::build_company_lexicon({}, general, 10, text::PrepProfile::dutch(), lex, &warnings);
    CHECK(empty.empty());
    CHECK(warnings.size() == 1);
}

TEST_CASE("company lexicon counts words, not numbers") {
    auto lex = text::Lexicon{};
    auto freqs = features::company_term_frequencies({"loonportaal 404 404 404"}, {},
                                                    text::PrepProfile::dutch(), lex);
    REQUIRE(freqs.size() == 1);
    CHECK(freqs[0].first == "loonportaal");
}

TEST_CASE("company terms feature: capped distinct counting") {
    auto lex = feature_lexicon();
    auto value = [&](const std::string& answer) {
        return features::company_terms_feature(lemmas_of(answer, lex), lex.company_terms, 3).value;
    };
    CHECK(value("gewoon antwoord zonder termen") == 0.0);
    CHECK(value("de profitanalyzer toont het loonportaal naast de salaristab") == 1.0);
    CHECK(value("open de profitanalyzer, de profitanalyzer dus") == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("component extraction follows the structural trigger") {
    auto res = default_component_res();
    auto components = features::extract_components("Klik op: Salaris", res);
    REQUIRE(components.size() == 1);
    CHECK(components[0].text == "salaris");

    CHECK(features::extract_components("gewone tekst zonder triggers", res).empty());
    // the documented extraction miss: unstructured phrasing
    CHECK(features::extract_components("The salary button should be clicked", res).empty());

    auto bounded = features::extract_components("Klik op: Salaris. Daarna verder lezen.", res);
    REQUIRE(bounded.size() == 1);
    CHECK(bounded[0].text == "salaris");

    auto english = features::extract_components("Click on: Tax Settings\nthen wait", res);
    REQUIRE(english.size() == 1);
    CHECK(english[0].text == "tax settings");
}

TEST_CASE("components defined: grounded, ungrounded, vacuous") {
    auto res = default_component_res();
    const std::string context = "Handleiding.\nKlik op: Salaris om de strook te zien.";

    auto grounded = features::components_defined_feature("Ga naar: Salaris", context, res);
    CHECK(grounded.value == 1.0);
    CHECK_FALSE(grounded.override_signal);

    auto ungrounded = features::components_defined_feature("Klik op: Fantasieknop", context, res);
    CHECK(ungrounded.value == 0.0);
    CHECK(ungrounded.override_signal);
    REQUIRE(ungrounded.diagnostics["undefined"].size() == 1);
    CHECK(ungrounded.diagnostics["undefined"][0] == "fantasieknop");

    auto vacuous = features::components_defined_feature("Geen componenten hier.", context, res);
    CHECK(vacuous.value == 1.0);
    CHECK_FALSE(vacuous.override_signal);
}

TEST_CASE("adding the missing component to the context flips the feature") {
    auto res = default_component_res();
    std::string context = "De handleiding bespreekt instellingen.";
    auto before = features::components_defined_feature("Klik op: Salaristab", context, res);
    CHECK(before.value == 0.0);
    context += "\nOpen daarna de salaristab onder beheer.";
    auto after = features::components_defined_feature("Klik op: Salaristab", context, res);
    CHECK(after.value == 1.0);
}

TEST_CASE("complex answer counts distinct matched signal lists over four") {
    auto lex = feature_lexicon();
    auto value = [&](const std::string& answer) {
        return features::complex_answer_feature(lemmas_of(answer, lex), lex).value;
    };
    CHECK(value("volgens mij vergeleken bijvoorbeeld omdat") == 1.0);
    CHECK(value("niets bijzonders hier") == 0.0);
    CHECK(value("bijvoorbeeld dit omdat dat") == 0.5); // examples + reasoning
    // multi-word phrase entry
    CHECK(value("in vergelijking met gisteren") == doctest::Approx(0.25));
}

TEST_CASE("prompt overlap: distinct content words of the message found in the answer") {
    auto lex = feature_lexicon();
    auto value = [&](const std::string& message, const std::string& answer) {
        return features::prompt_overlap_feature(lemmas_of(message, lex), lemmas_of(answer, lex), lex)
            .value;
    };
    CHECK(value("belasting tarief", "het tarief en de belasting") == 1.0);
    CHECK(value("belasting tarief", "iets heel anders") == 0.0);
    CHECK(value("alfa beta gamma delta", "alfa beta epsilon") == 0.5);
    // stopword-only message has no content words
    CHECK(value("de het een", "de het een") == 0.0);
    // the message side is stopword-filtered even under the dutch profile
    CHECK(value("de belasting", "belasting") == 1.0);
}

TEST_CASE("HAL matrix: ramped weights inside the window, symmetric, no self-pairs") {
    auto m = features::build_hal_matrix({"a", "b"}, 10);
    CHECK(m.weight_of("a", "b") == 10.0); // adjacent: window - 1 + 1
    CHECK(m.weight_of("b", "a") == 10.0);

    std::vector<std::string> spread{"x"};
    for (int i = 0; i < 10; ++i) spread.push_back("filler" + std::to_string(i));
    spread.push_back("y"); // distance 11
    auto far = features::build_hal_matrix(spread, 10);
    CHECK(far.weight_of("x", "y") == 0.0);

    CHECK(features::build_hal_matrix({}, 10).empty());
    CHECK(features::build_hal_matrix({"a", "a", "a"}, 5).empty()); // self-pairs excluded

    auto rep = features::build_hal_matrix({"a", "b", "a"}, 10);
    CHECK(rep.weight_of("a", "b") == 10.0 + 10.0); // both directions fold together
}

TEST_CASE("HAL matrix equals a brute-force oracle on random streams") {
    std::mt19937 rng(42);
    std::vector<std::string> vocab = {"aa", "bb", "cc", "dd", "ee", "ff"};
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<std::string> stream;
        auto len = rng() % 60;
        for (std::size_t i = 0; i < len; ++i) stream.push_back(vocab[rng() % vocab.size()]);
        const int window = 1 + static_cast<int>(rng() % 10);

        std::map<std::pair<std::string, std::string>, double> oracle;
        for (std::size_t i = 0; i < stream.size(); ++i)
            for (std::size_t j = i + 1; j < stream.size(); ++j) {
                if (j - i > static_cast<std::size_t>(window)) continue;
                if (stream[i] == stream[j]) continue;
                auto key = std::minmax(stream[i], stream[j]);
                oracle[key] += window - static_cast<double>(j - i) + 1;
            }

        auto m = features::build_hal_matrix(stream, window);
        CHECK(m.pair_count() == oracle.size());
        for (const auto& [key, w] : oracle)
            CHECK(m.weight_of(key.first, key.second) == doctest::Approx(w).epsilon(1e-12));
    }
}

TEST_CASE("HAL grounding: copied answers, disjoint answers, no pairs") {
    std::vector<std::string> answer = {"open", "menu", "salaris", "bevestig", "tarief"};
    std::vector<std::string> context = {"intro", "tekst"};
    context.insert(context.end(), answer.begin(), answer.end());
    context.push_back("slot");

    // the copied span is the strongest thing in the context, so every
    // answer pair is fully grounded
    CHECK(features::hal_window_score(answer, context, 10, 20) == doctest::Approx(1.0));

    std::vector<std::string> disjoint = {"heel", "iets", "anders", "hier"};
    CHECK(features::hal_window_score(disjoint, context, 10, 20) == 0.0);

    CHECK(features::hal_window_score({"salaris"}, context, 10, 20) == 0.5);
    CHECK(features::hal_window_score({}, context, 10, 20) == 0.5);

    auto fv = features::hal_feature(answer, context, {1, 5, 10}, 20);
    CHECK(fv.value == doctest::Approx(1.0));
    CHECK(fv.diagnostics["per_window"].size() == 3);
}

TEST_CASE("subject pair extraction: nearest preceding noun per verb") {
    auto lex = feature_lexicon();
    features::PosPairExtractor extractor(lex.pos);
    auto pairs = [&](const std::string& s) { return extractor.extract(lemmas_of(s, lex)).pairs; };

    using P = features::WordPair;
    CHECK(pairs("the employee receives a payslip") == std::set<P>{{"receive", "employee"}});
    CHECK(pairs("the manager opens the menu") == std::set<P>{{"open", "manager"}});
    CHECK(pairs("click the button") == std::set<P>{}); // verb without preceding noun
    CHECK(pairs("the employee opens the menu and receives an overview") ==
          std::set<P>{{"open", "employee"}, {"receive", "menu"}});
    CHECK(pairs("the tax rate changes") == std::set<P>{{"change", "rate"}});
    CHECK(pairs("") == std::set<P>{});
    CHECK(pairs("payslip") == std::set<P>{});
    CHECK(pairs("receive receive") == std::set<P>{});
    CHECK(pairs("the employee and the manager confirm the overview") ==
          std::set<P>{{"confirm", "manager"}});
    CHECK(pairs("the button shows the overview") == std::set<P>{{"show", "button"}});
}

TEST_CASE("subject combination: grounded share of answer pairs") {
    features::SubjectPairs answer, context;
    answer.pairs = {{"receive", "employee"}, {"open", "manager"}};
    context.pairs = {{"receive", "employee"}, {"open", "manager"}, {"show", "button"}};
    CHECK(features::subject_combination_feature(answer, context).value == 1.0);

    context.pairs = {{"show", "button"}};
    CHECK(features::subject_combination_feature(answer, context).value == 0.0);

    context.pairs = {{"receive", "employee"}};
    CHECK(features::subject_combination_feature(answer, context).value == 0.5);

    features::SubjectPairs none;
    CHECK(features::subject_combination_feature(none, context).value == 0.5);
}

TEST_CASE("guide extraction: numbered runs of at least two lines") {
    auto res = default_guide_res();

    auto one = features::extract_guides("1. open settings\n2. click salary", res);
    REQUIRE(one.size() == 1);
    CHECK(one[0].steps == std::vector<std::string>{"open settings", "click salary"});

    CHECK(features::extract_guides("gewoon lopende tekst\nzonder nummering", res).empty());
    CHECK(features::extract_guides("1. een enkele regel", res).empty());

    auto two = features::extract_guides(
        "1. eerste stap\n2. tweede stap\nwat uitleg er tussen\n1) andere gids\n2) tweede stap\n3) derde",
        res);
    REQUIRE(two.size() == 2);
    CHECK(two[0].steps.size() == 2);
    CHECK(two[1].steps.size() == 3);

    // numbering restart splits runs even without prose in between
    auto restart = features::extract_guides("1. a\n2. b\n1. c\n2. d", res);
    REQUIRE(restart.size() == 2);

    auto stap = features::extract_guides("Stap 1: open het menu\nStap 2: kies salaris", res);
    REQUIRE(stap.size() == 1);
    CHECK(stap[0].steps[0] == "open het menu");

    // blank lines inside a run do not break it
    auto blanks = features::extract_guides("1. eerste\n\n2. tweede", res);
    REQUIRE(blanks.size() == 1);
    CHECK(blanks[0].steps.size() == 2);
}

TEST_CASE("step cosine on lemma bags") {
    CHECK(features::step_cosine({"open", "menu"}, {"open", "menu"}) == doctest::Approx(1.0));
    CHECK(features::step_cosine({"open", "menu"}, {"sluit", "venster"}) == 0.0);
    CHECK(features::step_cosine({}, {}) == 1.0);
    CHECK(features::step_cosine({"a"}, {}) == 0.0);
    CHECK(features::step_cosine({"a", "b"}, {"a", "c"}) == doctest::Approx(0.5));
}

TEST_CASE("verbatim guide: copied, disjoint, length tolerance") {
    auto lex = feature_lexicon();
    auto res = default_guide_res();
    const auto& profile = text::PrepProfile::dutch();

    const std::string guide = "1. open het menu\n2. klik salaris\n3. bevestig tarief";
    const std::vector<std::string> context = {"inleiding\n" + guide + "\nnaschrift"};

    auto copied = features::verbatim_guide_feature(guide, context, res, 0.8, 1, profile, lex);
    CHECK(copied.value == 1.0);
    CHECK(copied.override_signal);

    auto disjoint = features::verbatim_guide_feature(
        "1. something else\n2. entirely different", context, res, 0.8, 1, profile, lex);
    CHECK(disjoint.value == 0.0);
    CHECK_FALSE(disjoint.override_signal);

    auto no_guide = features::verbatim_guide_feature("los antwoord", context, res, 0.8, 1, profile, lex);
    CHECK(no_guide.value == 0.0);

    // answer guide one step shorter: within the default tolerance
    auto shorter = features::verbatim_guide_feature("1. open het menu\n2. klik salaris", context,
                                                    res, 0.8, 1, profile, lex);
    CHECK(shorter.value == 1.0);

    // two steps difference exceeds the tolerance
    auto much_shorter = features::verbatim_guide_feature(
        "1. open het menu", context, res, 0.8, 1, profile, lex);
    CHECK(much_shorter.value == 0.0);
}

TEST_CASE("appending the guide to the context flips the verbatim feature") {
    auto lex = feature_lexicon();
    auto res = default_guide_res();
    const std::string answer = "1. open het menu\n2. klik salaris";
    std::vector<std::string> context = {"alleen lopende tekst"};
    CHECK(features::verbatim_guide_feature(answer, context, res, 0.8, 1,
                                           text::PrepProfile::dutch(), lex)
              .value == 0.0);
    context.push_back("uitleg\n" + answer);
    CHECK(features::verbatim_guide_feature(answer, context, res, 0.8, 1,
                                           text::PrepProfile::dutch(), lex)
              .value == 1.0);
}

// --- extract_all ---------------------------------------------------------------

namespace {

corpus::Record make_record(const std::string& message, const std::string& answer,
                           const std::string& context_body) {
    corpus::Record r;
    r.id = "t1";
    r.message = message;
    r.answer = answer;
    if (!context_body.empty()) r.context = {{"d1", "Doc", context_body}};
    return r;
}

} // namespace

TEST_CASE("extract_all produces all seven features in dutch mode") {
    auto lex = feature_lexicon();
    text::Lexicon english;
    features::ExtractionContext ctx(lex, english, features::FeatureConfig{},
                                    features::Profile::Dutch, true);

    features::ScoringInput input;
    input.original = make_record("Hoe wijzig ik het belastingtarief?",
                                 "Open de salaristab, bijvoorbeeld omdat het belastingtarief "
                                 "wijzigt.\n1. open menu\n2. kies tarief",
                                 "De salaristab toont het belastingtarief.\n1. open menu\n2. kies tarief");

    auto fv = features::extract_all(input, ctx);
    CHECK(fv.complete());
    for (auto name : features::kAllFeatures) {
        CHECK(fv.at(name).value >= 0.0);
        CHECK(fv.at(name).value <= 1.0);
    }
    CHECK(fv.at(FeatureName::CompanyTerms).value == doctest::Approx(1.0 / 3.0));
    CHECK(fv.at(FeatureName::VerbatimGuide).value == 1.0);
}

TEST_CASE("extract_all on an empty answer hits the documented empty-input values") {
    auto lex = feature_lexicon();
    text::Lexicon english;
    features::ExtractionContext ctx(lex, english, features::FeatureConfig{},
                                    features::Profile::Dutch, true);

    features::ScoringInput input;
    input.original = make_record("Hoe wijzig ik dit?", "x", "Er is context aanwezig.");
    input.original.answer = ""; // bypasses ingestion validation on purpose

    auto fv = features::extract_all(input, ctx);
    CHECK(fv.at(FeatureName::CompanyTerms).value == 0.0);
    CHECK(fv.at(FeatureName::ComponentsDefined).value == 1.0);
    CHECK(fv.at(FeatureName::ComplexAnswer).value == 0.0);
    CHECK(fv.at(FeatureName::PromptOverlap).value == 0.0);
    CHECK(fv.at(FeatureName::Hal).value == 0.5);
    CHECK(fv.at(FeatureName::SubjectCombination).value == 0.5);
    CHECK(fv.at(FeatureName::VerbatimGuide).value == 0.0);
}

TEST_CASE("english mode requires a translation and routes the right features") {
    auto dutch_lex = feature_lexicon();
    text::Lexicon english_lex;
    english_lex.stopwords = {"the", "a", "to"};
    features::ExtractionContext ctx(dutch_lex, english_lex, features::FeatureConfig{},
                                    features::Profile::English, true);

    features::ScoringInput input;
    input.original = make_record("Kan ik de profitanalyzer openen?", "De profitanalyzer opent het overzicht.",
                                 "Iets totaal anders hier.");

    // untranslated record: hard error, never silent fallback
    CHECK_THROWS_AS(features::extract_all(input, ctx), TranslationError);

    // translated record: HAL reads the English text (answer copied from its
    // context scores high), company terms still read the Dutch original
    corpus::Record translated = input.original;
    translated.language = corpus::Language::English;
    translated.answer = "the analyzer opens the overview";
    translated.context = {{"d1", "Doc", "intro words the analyzer opens the overview closing remark"}};
    input.translated = translated;

    auto fv = features::extract_all(input, ctx);
    CHECK(fv.at(FeatureName::CompanyTerms).value == doctest::Approx(1.0 / 3.0));
    CHECK(fv.at(FeatureName::Hal).value == doctest::Approx(1.0));
}

TEST_CASE("feature values stay in [0,1] on random inputs") {
    auto lex = feature_lexicon();
    text::Lexicon english;
    features::ExtractionContext ctx(lex, english, features::FeatureConfig{},
                                    features::Profile::Dutch, true);

    std::mt19937 rng(99);
    std::vector<std::string> vocab = {"open",  "menu",   "salaris", "1.",          "klik",
                                      "op:",   "omdat",  "tarief",  "bijvoorbeeld", "404",
                                      "einde", "gewoon", "de",      "profitanalyzer"};
    auto random_text = [&](std::size_t max_len) {
        std::string s;
        auto len = rng() % max_len;
        for (std::size_t i = 0; i < len; ++i) {
            s += vocab[rng() % vocab.size()];
            s += (rng() % 7 == 0) ? '\n' : ' ';
        }
        return s;
    };

    for (int iter = 0; iter < 100; ++iter) {
        features::ScoringInput input;
        input.original = make_record("Hoe werkt dit?", random_text(60), random_text(200));
        auto fv = features::extract_all(input, ctx);
        for (auto name : features::kAllFeatures) {
            CHECK(fv.at(name).value >= 0.0);
            CHECK(fv.at(name).value <= 1.0);
        }
    }
}

TEST_CASE("extraction is deterministic across repeated runs") {
    auto lex = feature_lexicon();
    text::Lexicon english;
    features::ExtractionContext ctx(lex, english, features::FeatureConfig{},
                                    features::Profile::Dutch, true);
    features::ScoringInput input;
    input.original = make_record("Hoe wijzig ik dit?", "Open de salaristab omdat dat moet.",
                                 "De salaristab staat beschreven.");
    auto fv1 = features::extract_all(input, ctx);
    auto fv2 = features::extract_all(input, ctx);
    for (auto name : features::kAllFeatures) {
        CHECK(fv1.at(name).value == fv2.at(name).value);
        CHECK(fv1.at(name).diagnostics == fv2.at(name).diagnostics);
    }
}
