#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "veracity/classify.hpp"
#include "veracity/config.hpp"
#include "veracity/corpus.hpp"
#include "veracity/eval.hpp"
#include "veracity/scoring.hpp"
#include "veracity/textprep.hpp"
#include "veracity/version.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

json py_to_json(const py::handle& obj) {
    if (obj.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
    if (py::isinstance<py::int_>(obj)) return obj.cast<std::int64_t>();
    if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
    if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
    if (py::isinstance<py::dict>(obj)) {
        json j = json::object();
        for (auto item : obj.cast<py::dict>())
            j[item.first.cast<std::string>()] = py_to_json(item.second);
        return j;
    }
    if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
        json j = json::array();
        for (auto item : obj.cast<py::sequence>()) j.push_back(py_to_json(item));
        return j;
    }
    throw py::type_error("unsupported value type for record conversion");
}

py::object json_to_py(const json& j) {
    switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
        py::list out;
        for (const auto& item : j) out.append(json_to_py(item));
        return out;
    }
    case json::value_t::object: {
        py::dict out;
        for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
        return out;
    }
    default: return py::none();
    }
}

/// Scoring pipeline bound to one config; records come and go as dicts.
class Scorer {
public:
    explicit Scorer(const std::optional<std::string>& config_path) {
        cfg_ = config_path ? veracity::cli::AppConfig::load(*config_path)
                           : veracity::cli::AppConfig::defaults();
        dutch_ = cfg_.load_lexicon(cfg_.dutch);
        english_ = cfg_.load_lexicon(cfg_.english);
        ctx_ = std::make_unique<veracity::scoring::ScoringContext>(
            cfg_.load_rules(),
            veracity::features::ExtractionContext(dutch_, english_, cfg_.feature_config,
                                                  cfg_.profile, cfg_.include_system_prompt));
    }

    std::string classify(const std::string& message) const {
        return veracity::classify::to_string(
            veracity::classify::classify_message(message, ctx_->rules));
    }

    py::object score(const py::dict& record) const {
        veracity::features::ScoringInput input;
        input.original = veracity::corpus::record_from_json(py_to_json(record));
        auto result = veracity::scoring::score_record(input, *ctx_);
        return json_to_py(veracity::scoring::scored_record_json(input.original, result));
    }

    py::object extract_features(const py::dict& record) const {
        veracity::features::ScoringInput input;
        input.original = veracity::corpus::record_from_json(py_to_json(record));
        auto fv = veracity::features::extract_all(input, ctx_->extraction);
        py::dict out;
        for (auto name : veracity::features::kAllFeatures)
            out[py::str(veracity::features::to_string(name))] = fv.at(name).value;
        return out;
    }

private:
    veracity::cli::AppConfig cfg_;
    veracity::text::Lexicon dutch_;
    veracity::text::Lexicon english_;
    std::unique_ptr<veracity::scoring::ScoringContext> ctx_;
};

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Reference-free truthfulness scoring for RAG chatbot answers";
    m.attr("__version__") = veracity::kVersion;

    m.def(
        "classify_message",
        [](const std::string& message) {
            return veracity::classify::to_string(veracity::classify::classify_message(
                message, veracity::classify::TypeRules::defaults()));
        },
        py::arg("message"), "Message type under the built-in ordered pattern rules");

    m.def(
        "is_scorable",
        [](const std::string& type) {
            return veracity::classify::is_scorable(veracity::classify::type_from_string(type));
        },
        py::arg("message_type"));

    m.def(
        "tokenize",
        [](const std::string& text) {
            std::vector<std::string> out;
            for (const auto& t : veracity::text::tokenize(text).tokens) out.push_back(t.surface);
            return out;
        },
        py::arg("text"), "Token surfaces after whitespace/punctuation splitting");

    m.def(
        "spearman",
        [](const std::vector<double>& xs, const std::vector<double>& ys) {
            auto c = veracity::eval::spearman(xs, ys);
            return py::make_tuple(c.rho, c.p_value);
        },
        py::arg("xs"), py::arg("ys"),
        "Spearman rho and two-sided p-value (t-approximation)");

    m.def("cohen_kappa", &veracity::eval::cohen_kappa, py::arg("a"), py::arg("b"));

    m.def(
        "classifier_metrics",
        [](const std::vector<std::string>& predicted, const std::vector<std::string>& actual,
           const std::string& scope) {
            std::vector<veracity::classify::MessageType> p, a;
            for (const auto& s : predicted) p.push_back(veracity::classify::type_from_string(s));
            for (const auto& s : actual) a.push_back(veracity::classify::type_from_string(s));
            veracity::eval::MetricScope sc;
            if (scope == "all") sc = veracity::eval::MetricScope::All;
            else if (scope == "binary") sc = veracity::eval::MetricScope::Binary;
            else if (scope == "instruction") sc = veracity::eval::MetricScope::Instruction;
            else if (scope == "binary_or_instruction")
                sc = veracity::eval::MetricScope::BinaryOrInstruction;
            else throw py::value_error("unknown scope: " + scope);
            auto metrics = veracity::eval::classifier_metrics(p, a, sc);
            py::dict out;
            out["f1"] = metrics.f1;
            out["accuracy"] = metrics.accuracy;
            out["precision"] = metrics.precision;
            out["recall"] = metrics.recall;
            return out;
        },
        py::arg("predicted"), py::arg("actual"), py::arg("scope") = "all");

    m.def(
        "load_dataset",
        [](const std::string& path) {
            auto result = veracity::corpus::load_dataset(path, "dataset");
            py::list records;
            for (const auto& r : result.dataset.records)
                records.append(json_to_py(veracity::corpus::record_to_json(r)));
            return py::make_tuple(records, result.skipped.size());
        },
        py::arg("path"), "Returns (records, skipped_line_count)");

    py::class_<Scorer>(m, "Scorer")
        .def(py::init<const std::optional<std::string>&>(), py::arg("config_path") = py::none())
        .def("classify", &Scorer::classify, py::arg("message"))
        .def("score", &Scorer::score, py::arg("record"))
        .def("extract_features", &Scorer::extract_features, py::arg("record"));
}
