#include "veracity/corpus.hpp"

#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "veracity/error.hpp"
#include "veracity/util.hpp"

using nlohmann::json;

namespace veracity::corpus {

std::string to_string(Language lang) {
    return lang == Language::Dutch ? "nl" : "en";
}

Language language_from_string(const std::string& s) {
    if (s == "nl") return Language::Dutch;
    if (s == "en") return Language::English;
    throw ValidationError("unknown language tag: " + s);
}

std::string to_string(RejectionReason reason) {
    switch (reason) {
    case RejectionReason::Truthfulness: return "truthfulness";
    case RejectionReason::Relatedness: return "relatedness";
    case RejectionReason::Completeness: return "completeness";
    }
    return "?";
}

RejectionReason rejection_reason_from_string(const std::string& s) {
    if (s == "truthfulness") return RejectionReason::Truthfulness;
    if (s == "relatedness") return RejectionReason::Relatedness;
    if (s == "completeness") return RejectionReason::Completeness;
    throw ValidationError("unknown rejection reason: " + s);
}

namespace {

const std::unordered_set<std::string> kKnownFields = {
    "id", "message", "answer", "context", "system_prompt",
    "human_rating", "language", "rejection_reasons",
};

std::string require_string(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_string())
        throw ValidationError(std::string("missing or non-string field '") + field + "'");
    return j[field].get<std::string>();
}

} // namespace

Record record_from_json(const json& j, std::vector<std::string>* warnings) {
    if (!j.is_object()) throw ValidationError("record is not an object");

    Record r;
    r.id = require_string(j, "id");
    if (r.id.empty()) throw ValidationError("empty record id");
    r.message = require_string(j, "message");
    r.answer = require_string(j, "answer");
    if (util::trim(r.message).empty()) throw ValidationError("record " + r.id + ": empty message");
    if (util::trim(r.answer).empty()) throw ValidationError("record " + r.id + ": empty answer");

    if (j.contains("context")) {
        if (!j["context"].is_array())
            throw ValidationError("record " + r.id + ": context is not an array");
        std::unordered_set<std::string> seen;
        for (const auto& d : j["context"]) {
            ContextDoc doc;
            doc.id = require_string(d, "id");
            doc.title = d.value("title", std::string());
            doc.body = require_string(d, "body");
            if (util::trim(doc.body).empty())
                throw ValidationError("record " + r.id + ": context doc " + doc.id + " has empty body");
            if (!seen.insert(doc.id).second)
                throw ValidationError("record " + r.id + ": duplicate context doc id " + doc.id);
            r.context.push_back(std::move(doc));
        }
    }

    if (j.contains("system_prompt") && !j["system_prompt"].is_null())
        r.system_prompt = j["system_prompt"].get<std::string>();

    if (j.contains("human_rating") && !j["human_rating"].is_null()) {
        if (!j["human_rating"].is_number_integer())
            throw ValidationError("record " + r.id + ": human_rating is not an integer");
        int rating = j["human_rating"].get<int>();
        if (rating < 1 || rating > 5)
            throw ValidationError("record " + r.id + ": human_rating out of [1,5]: " + std::to_string(rating));
        r.human_rating = rating;
    }

    if (j.contains("language") && !j["language"].is_null())
        r.language = language_from_string(j["language"].get<std::string>());

    if (j.contains("rejection_reasons") && !j["rejection_reasons"].is_null()) {
        for (const auto& s : j["rejection_reasons"])
            r.rejection_reasons.insert(rejection_reason_from_string(s.get<std::string>()));
    }

    if (warnings) {
        for (const auto& [key, value] : j.items()) {
            (void)value;
            if (!kKnownFields.count(key))
                warnings->push_back("record " + r.id + ": ignoring unknown field '" + key + "'");
        }
    }
    return r;
}

json record_to_json(const Record& r) {
    json j;
    j["id"] = r.id;
    j["message"] = r.message;
    j["answer"] = r.answer;
    j["context"] = json::array();
    for (const auto& d : r.context)
        j["context"].push_back({{"id", d.id}, {"title", d.title}, {"body", d.body}});
    if (r.system_prompt) j["system_prompt"] = *r.system_prompt;
    if (r.human_rating) j["human_rating"] = *r.human_rating;
    j["language"] = to_string(r.language);
    if (!r.rejection_reasons.empty()) {
        json reasons = json::array();
        for (auto reason : r.rejection_reasons) reasons.push_back(to_string(reason));
        j["rejection_reasons"] = reasons;
    }
    return j;
}

LoadResult load_dataset(const std::filesystem::path& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path.string());

    LoadResult result;
    result.dataset.name = name;
    std::unordered_set<std::string> ids;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            result.skipped.push_back({line_no, "invalid JSON"});
            continue;
        }
        Record r;
        try {
            r = record_from_json(j, &result.warnings);
        } catch (const ValidationError& e) {
            result.skipped.push_back({line_no, e.what()});
            continue;
        }
        if (!ids.insert(r.id).second)
            throw ValidationError("duplicate record id '" + r.id + "' at line " + std::to_string(line_no));
        result.dataset.records.push_back(std::move(r));
    }
    return result;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset file: " + path.string());
    for (const auto& r : ds.records) out << record_to_json(r).dump() << '\n';
}

std::map<int, std::size_t> rating_distribution(const Dataset& ds) {
    std::map<int, std::size_t> counts;
    for (const auto& r : ds.records)
        if (r.human_rating) ++counts[*r.human_rating];
    return counts;
}

} // namespace veracity::corpus
