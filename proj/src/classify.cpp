#include "veracity/classify.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "veracity/error.hpp"
#include "veracity/util.hpp"

using nlohmann::json;

namespace veracity::classify {

std::string to_string(MessageType t) {
    switch (t) {
    case MessageType::Error: return "error";
    case MessageType::General: return "general";
    case MessageType::Reasoning: return "reasoning";
    case MessageType::Instruction: return "instruction";
    case MessageType::Binary: return "binary";
    case MessageType::Action: return "action";
    case MessageType::Unspecified: return "unspecified";
    }
    return "?";
}

MessageType type_from_string(const std::string& s) {
    for (MessageType t : kAllTypes)
        if (to_string(t) == s) return t;
    throw ValidationError("unknown message type: " + s);
}

namespace {

// The fixed scan order. Action never appears: no message of that type was
// available to derive patterns from.
constexpr MessageType kStageOrder[] = {
    MessageType::Error, MessageType::General, MessageType::Reasoning,
    MessageType::Instruction, MessageType::Binary,
};

} // namespace

TypeRules TypeRules::defaults() {
    TypeRules rules;
    rules.stages = {
        {MessageType::Error, {"error"}},
        {MessageType::General, {" explanation", "what is"}},
        {MessageType::Reasoning, {"why", "how can this"}},
        {MessageType::Instruction, {"how ", "where "}},
        {MessageType::Binary, {"possible", "can "}},
    };
    rules.reasoning_no_question_mark = true;
    return rules;
}

TypeRules TypeRules::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open rules file: " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("rules file is not valid JSON: " + path.string());

    TypeRules rules;
    rules.reasoning_no_question_mark = j.value("reasoning_matches_missing_question_mark", true);
    const json patterns = j.value("patterns", json::object());
    for (MessageType type : kStageOrder) {
        TypeRules::Stage stage{type, {}};
        std::string key = to_string(type);
        if (patterns.contains(key)) {
            for (const auto& p : patterns[key]) {
                std::string pat = util::to_lower(p.get<std::string>());
                if (pat.empty()) throw ConfigError("rules file has an empty pattern for " + key);
                stage.patterns.push_back(std::move(pat));
            }
        }
        rules.stages.push_back(std::move(stage));
    }
    for (const auto& [key, value] : patterns.items()) {
        (void)value;
        MessageType t = type_from_string(key);
        if (t == MessageType::Action || t == MessageType::Unspecified)
            throw ConfigError("rules file assigns patterns to '" + key +
                              "', which never carries a pattern list");
    }
    return rules;
}

void TypeRules::save(const std::filesystem::path& path) const {
    json patterns = json::object();
    for (const auto& stage : stages) patterns[to_string(stage.type)] = stage.patterns;
    json j = {{"patterns", patterns},
              {"reasoning_matches_missing_question_mark", reasoning_no_question_mark}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write rules file: " + path.string());
    out << j.dump(2) << '\n';
}

MessageType classify_message(std::string_view message, const TypeRules& rules) {
    const std::string lowered = util::to_lower(message);
    const bool has_question_mark = lowered.find('?') != std::string::npos;

    for (const auto& stage : rules.stages) {
        for (const auto& pattern : stage.patterns)
            if (lowered.find(pattern) != std::string::npos) return stage.type;
        if (stage.type == MessageType::Reasoning && rules.reasoning_no_question_mark &&
            !has_question_mark)
            return MessageType::Reasoning;
    }
    return MessageType::Unspecified;
}

bool is_scorable(MessageType t) {
    return t == MessageType::Binary || t == MessageType::Instruction;
}

} // namespace veracity::classify
