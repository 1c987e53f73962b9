#include <doctest.h>

#include <filesystem>

#include "veracity/classify.hpp"
#include "veracity/error.hpp"
#include "veracity/util.hpp"

using namespace veracity;
using classify::MessageType;

TEST_CASE("taxonomy example messages under the ordered rules") {
    auto rules = classify::TypeRules::defaults();
    auto label = [&](const char* m) { return classify::classify_message(m, rules); };

    CHECK(label("I get the error: mutation cannot be executed") == MessageType::Error);
    CHECK(label("Would it be possible to adjust tax rates manually?") == MessageType::Binary);
    CHECK(label("How would I adjust tax rates manually?") == MessageType::Instruction);
    CHECK(label("I have adjusted tax settings, why don't I see a payslip anymore?") ==
          MessageType::Reasoning);

    // No pattern list exists for Action, and the statement carries no
    // question mark, so the Reasoning stage catches it.
    CHECK(label("write an email to notify customers of the new tax rates.") ==
          MessageType::Reasoning);

    // Greetings have no question mark either: Reasoning, not Unspecified.
    CHECK(label("Good morning") == MessageType::Reasoning);
    CHECK(label("I just ate a sandwich") == MessageType::Reasoning);

    // The general fragments (" explanation", "what is") do not hit these,
    // so they fall through every list.
    CHECK(label("What are the tax rates in the Netherlands?") == MessageType::Unspecified);
    CHECK(label("What products do you offer?") == MessageType::Unspecified);
}

TEST_CASE("first matching list wins when several lists share a word") {
    auto rules = classify::TypeRules::defaults();
    // "why" (Reasoning) appears before "possible" (Binary) in the order
    CHECK(classify::classify_message("Why is that possible?", rules) == MessageType::Reasoning);
    // "error" beats everything
    CHECK(classify::classify_message("How do I fix this error?", rules) == MessageType::Error);
    // instruction beats binary
    CHECK(classify::classify_message("How can I make this possible?", rules) ==
          MessageType::Instruction);
}

TEST_CASE("classification is case-insensitive and deterministic") {
    auto rules = classify::TypeRules::defaults();
    const char* messages[] = {"HOW WOULD I ADJUST TAX RATES MANUALLY?", "Good MORNING",
                              "would it be POSSIBLE to do this?"};
    for (const char* m : messages) {
        auto lowered = util::to_lower(m);
        CHECK(classify::classify_message(m, rules) ==
              classify::classify_message(lowered, rules));
        CHECK(classify::classify_message(m, rules) == classify::classify_message(m, rules));
    }
}

TEST_CASE("patterns are plain substring containment") {
    auto rules = classify::TypeRules::defaults();
    CHECK(classify::classify_message("how do I open it?", rules) == MessageType::Instruction);
    // the trailing space guards the right edge only; "show me" contains "how "
    CHECK(classify::classify_message("show me the menu?", rules) == MessageType::Instruction);
    // but "however" does not
    CHECK(classify::classify_message("however?", rules) == MessageType::Unspecified);
}

TEST_CASE("question-mark rule inspects the raw message") {
    auto rules = classify::TypeRules::defaults();
    CHECK(classify::classify_message("Tell me about salaries", rules) == MessageType::Reasoning);
    rules.reasoning_no_question_mark = false;
    CHECK(classify::classify_message("Tell me about salaries", rules) == MessageType::Unspecified);
}

TEST_CASE("is_scorable covers exactly Binary and Instruction") {
    CHECK(classify::is_scorable(MessageType::Binary));
    CHECK(classify::is_scorable(MessageType::Instruction));
    for (auto t : {MessageType::Error, MessageType::General, MessageType::Reasoning,
                   MessageType::Action, MessageType::Unspecified})
        CHECK_FALSE(classify::is_scorable(t));
}

TEST_CASE("rules save/load round-trip and stage order is fixed") {
    auto rules = classify::TypeRules::defaults();
    auto path = std::filesystem::temp_directory_path() / "veracity_rules.json";
    rules.save(path);
    auto loaded = classify::TypeRules::load(path);
    std::filesystem::remove(path);

    REQUIRE(loaded.stages.size() == 5);
    CHECK(loaded.stages[0].type == MessageType::Error);
    CHECK(loaded.stages[1].type == MessageType::General);
    CHECK(loaded.stages[2].type == MessageType::Reasoning);
    CHECK(loaded.stages[3].type == MessageType::Instruction);
    CHECK(loaded.stages[4].type == MessageType::Binary);
    CHECK(loaded.reasoning_no_question_mark);
    CHECK(loaded.stages[3].patterns == rules.stages[3].patterns);
}

TEST_CASE("missing rules file is a fatal config error") {
    CHECK_THROWS_AS(classify::TypeRules::load("/nonexistent/rules.json"), ConfigError);
}
