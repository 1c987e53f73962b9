#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "veracity/corpus.hpp"
#include "veracity/error.hpp"

using namespace veracity;
using nlohmann::json;

namespace {

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& contents) {
        path = std::filesystem::temp_directory_path() /
               ("veracity_test_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + ".jsonl");
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::filesystem::remove(path); }
};

std::string record_line(const std::string& id, int rating = 0) {
    json j = {{"id", id},
              {"message", "Is it possible to adjust rates?"},
              {"answer", "Yes, under settings."},
              {"context", json::array({{{"id", "d1"}, {"title", "Rates"}, {"body", "Rates live in settings."}}})}};
    if (rating > 0) j["human_rating"] = rating;
    return j.dump();
}

} // namespace

TEST_CASE("load_dataset ingests well-formed lines in order") {
    TempFile f(record_line("a") + "\n" + record_line("b") + "\n" + record_line("c") + "\n");
    auto result = corpus::load_dataset(f.path, "fixture");
    CHECK(result.dataset.records.size() == 3);
    CHECK(result.skipped.empty());
    CHECK(result.dataset.records[0].id == "a");
    CHECK(result.dataset.records[2].id == "c");
    CHECK(result.dataset.records[0].language == corpus::Language::Dutch); // default
}

TEST_CASE("malformed lines are skipped and reported, never silently dropped") {
    TempFile f(record_line("a") + "\nnot json at all\n" +
               R"({"id":"b","message":"","answer":"x"})" + "\n");
    auto result = corpus::load_dataset(f.path, "fixture");
    CHECK(result.dataset.records.size() == 1);
    REQUIRE(result.skipped.size() == 2);
    CHECK(result.skipped[0].line_no == 2);
    CHECK(result.skipped[1].line_no == 3); // empty message violates the record invariant
}

TEST_CASE("duplicate record ids abort the load") {
    TempFile f(record_line("a") + "\n" + record_line("a") + "\n");
    CHECK_THROWS_AS(corpus::load_dataset(f.path, "fixture"), ValidationError);
}

TEST_CASE("unreadable file is a fatal I/O error") {
    CHECK_THROWS_AS(corpus::load_dataset("/nonexistent/nowhere.jsonl", "x"), IoError);
}

TEST_CASE("record invariants") {
    CHECK_THROWS_AS(corpus::record_from_json(json{{"id", "r"},
                                                  {"message", "m"},
                                                  {"answer", "a"},
                                                  {"human_rating", 7}}),
                    ValidationError);
    CHECK_THROWS_AS(
        corpus::record_from_json(json{{"id", "r"}, {"message", "m"}, {"answer", "a"},
                                      {"context", json::array({{{"id", "d"}, {"body", "  "}}})}}),
        ValidationError);
    // duplicate context doc id within one record
    CHECK_THROWS_AS(
        corpus::record_from_json(json{
            {"id", "r"},
            {"message", "m"},
            {"answer", "a"},
            {"context", json::array({{{"id", "d"}, {"body", "x"}}, {{"id", "d"}, {"body", "y"}}})}}),
        ValidationError);
}

TEST_CASE("unknown fields are ignored with a warning") {
    std::vector<std::string> warnings;
    auto r = corpus::record_from_json(
        json{{"id", "r"}, {"message", "m"}, {"answer", "a"}, {"wat", 1}}, &warnings);
    CHECK(r.id == "r");
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("wat") != std::string::npos);
}

TEST_CASE("serialize/load round-trip preserves structure") {
    corpus::Record r;
    r.id = "r1";
    r.message = "Hoe pas ik dit aan?";
    r.answer = "Klik op: Salaris.";
    r.context = {{"d1", "Handleiding", "Stap 1. Open instellingen."}};
    r.system_prompt = "Wees vriendelijk.";
    r.human_rating = 4;
    r.language = corpus::Language::Dutch;
    r.rejection_reasons = {corpus::RejectionReason::Truthfulness,
                           corpus::RejectionReason::Completeness};

    auto parsed = corpus::record_from_json(corpus::record_to_json(r));
    CHECK(parsed.id == r.id);
    CHECK(parsed.message == r.message);
    CHECK(parsed.answer == r.answer);
    REQUIRE(parsed.context.size() == 1);
    CHECK(parsed.context[0].body == r.context[0].body);
    CHECK(parsed.system_prompt == r.system_prompt);
    CHECK(parsed.human_rating == r.human_rating);
    CHECK(parsed.rejection_reasons == r.rejection_reasons);

    corpus::Dataset ds{"round", {r}};
    auto tmp = std::filesystem::temp_directory_path() / "veracity_roundtrip.jsonl";
    corpus::save_dataset(ds, tmp);
    auto loaded = corpus::load_dataset(tmp, "round");
    std::filesystem::remove(tmp);
    REQUIRE(loaded.dataset.records.size() == 1);
    CHECK(corpus::record_to_json(loaded.dataset.records[0]) == corpus::record_to_json(r));
}

TEST_CASE("rating_distribution matches the published set sizes") {
    // analysis set: {1:22, 2:2, 3:8, 4:6, 5:41}, 79 records
    // test set:     {1:32, 2:5, 3:19, 4:16, 5:82}, 154 records
    const std::map<int, std::size_t> analysis = {{1, 22}, {2, 2}, {3, 8}, {4, 6}, {5, 41}};
    const std::map<int, std::size_t> test = {{1, 32}, {2, 5}, {3, 19}, {4, 16}, {5, 82}};

    for (const auto& [expected, total] :
         {std::pair{analysis, std::size_t{79}}, std::pair{test, std::size_t{154}}}) {
        corpus::Dataset ds;
        int next_id = 0;
        for (const auto& [rating, count] : expected)
            for (std::size_t i = 0; i < count; ++i) {
                corpus::Record r;
                r.id = "r" + std::to_string(next_id++);
                r.message = "m";
                r.answer = "a";
                r.human_rating = rating;
                ds.records.push_back(std::move(r));
            }
        CHECK(ds.records.size() == total);
        CHECK(corpus::rating_distribution(ds) == expected);
        std::size_t sum = 0;
        for (const auto& [rating, count] : corpus::rating_distribution(ds)) sum += count;
        CHECK(sum == total);
    }

    // the same fixture through file ingestion
    corpus::Dataset analysis_ds{"analysis", {}};
    int next_id = 0;
    for (const auto& [rating, count] : analysis)
        for (std::size_t i = 0; i < count; ++i) {
            corpus::Record r;
            r.id = "a" + std::to_string(next_id++);
            r.message = "m";
            r.answer = "a";
            r.human_rating = rating;
            analysis_ds.records.push_back(std::move(r));
        }
    auto tmp = std::filesystem::temp_directory_path() / "veracity_analysis_fixture.jsonl";
    corpus::save_dataset(analysis_ds, tmp);
    auto loaded = corpus::load_dataset(tmp, "analysis");
    std::filesystem::remove(tmp);
    CHECK(loaded.dataset.records.size() == 79);
    CHECK(loaded.skipped.empty());
    CHECK(corpus::rating_distribution(loaded.dataset) == analysis);
}

TEST_CASE("rating_distribution skips unrated records and empty datasets") {
    corpus::Dataset ds;
    CHECK(corpus::rating_distribution(ds).empty());

    corpus::Record rated{"a", "m", "a", {}, {}, 3, corpus::Language::Dutch, {}};
    corpus::Record unrated{"b", "m", "a", {}, {}, {}, corpus::Language::Dutch, {}};
    ds.records = {rated, unrated};
    auto dist = corpus::rating_distribution(ds);
    CHECK(dist == std::map<int, std::size_t>{{3, 1}});
}
