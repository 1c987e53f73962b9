#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace veracity::classify {

enum class MessageType { Error, General, Reasoning, Instruction, Binary, Action, Unspecified };

inline constexpr MessageType kAllTypes[] = {
    MessageType::Error,  MessageType::General, MessageType::Reasoning, MessageType::Instruction,
    MessageType::Binary, MessageType::Action,  MessageType::Unspecified,
};

std::string to_string(MessageType t);
MessageType type_from_string(const std::string& s);

/// Ordered pattern lists. The stage order is fixed (Error, General,
/// Reasoning, Instruction, Binary); Unspecified is the fallback and Action
/// has no patterns. Patterns are lowercase and may carry significant
/// leading/trailing spaces to approximate word boundaries.
struct TypeRules {
    struct Stage {
        MessageType type;
        std::vector<std::string> patterns;
    };

    std::vector<Stage> stages;
    bool reasoning_no_question_mark = true;

    /// The built-in rule set (the published pattern fragments).
    static TypeRules defaults();
    static TypeRules load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

/// Lowercases the message and scans the pattern lists in order; the first
/// list with a substring match wins. The Reasoning stage also matches when
/// the raw message contains no question mark. Unspecified otherwise.
MessageType classify_message(std::string_view message, const TypeRules& rules);

/// Only Binary and Instruction messages receive a score.
bool is_scorable(MessageType t);

} // namespace veracity::classify
