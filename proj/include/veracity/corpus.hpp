#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace veracity::corpus {

enum class Language { Dutch, English };

/// The correctness dimensions a support rater can flag an answer on.
enum class RejectionReason { Truthfulness, Relatedness, Completeness };

std::string to_string(Language lang);
Language language_from_string(const std::string& s);
std::string to_string(RejectionReason reason);
RejectionReason rejection_reason_from_string(const std::string& s);

/// One retrieved document handed to the LLM together with the user message.
/// The system prompt is carried separately on the record but can be folded
/// into the feature context.
struct ContextDoc {
    std::string id;
    std::string title;
    std::string body;
};

/// One message/answer/context tuple, optionally carrying a 1-5 human
/// truthfulness rating. The unit of scoring and evaluation.
struct Record {
    std::string id;
    std::string message;
    std::string answer;
    std::vector<ContextDoc> context;
    std::optional<std::string> system_prompt;
    std::optional<int> human_rating; // 1 (very untrue) .. 5 (very true)
    Language language = Language::Dutch;
    std::set<RejectionReason> rejection_reasons;
};

struct Dataset {
    std::string name;
    std::vector<Record> records;
};

struct SkippedLine {
    std::size_t line_no; // 1-based
    std::string reason;
};

struct LoadResult {
    Dataset dataset;
    std::vector<SkippedLine> skipped;
    std::vector<std::string> warnings;
};

/// Parses a JSON record object, enforcing the record invariants.
/// Unknown fields are reported through `warnings` when given.
Record record_from_json(const nlohmann::json& j, std::vector<std::string>* warnings = nullptr);
nlohmann::json record_to_json(const Record& r);

/// Loads a line-delimited dataset. Malformed lines are skipped and reported
/// with their line number; duplicate record ids abort the load.
LoadResult load_dataset(const std::filesystem::path& path, const std::string& name);

void save_dataset(const Dataset& ds, const std::filesystem::path& path);

/// Counts records per rating value; unrated records are excluded.
std::map<int, std::size_t> rating_distribution(const Dataset& ds);

} // namespace veracity::corpus
