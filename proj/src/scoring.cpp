#include "veracity/scoring.hpp"

#include <nlohmann/json.hpp>

#include "veracity/error.hpp"
#include "veracity/version.hpp"

using nlohmann::json;

namespace veracity::scoring {

std::string to_string(Override o) {
    switch (o) {
    case Override::None: return "none";
    case Override::ComponentFail: return "component_fail";
    case Override::GuideMatch: return "guide_match";
    }
    return "?";
}

double aggregate(const features::FeatureVector& fv) {
    double sum = 0.0;
    for (auto name : features::kAllFeatures) sum += fv.at(name).value; // throws when missing
    return sum;
}

double to_scale(double sum) {
    if (sum < 0.0 || sum > 7.0)
        throw ValidationError("feature sum out of [0,7]: " + std::to_string(sum));
    return 1.0 + 4.0 * sum / 7.0;
}

std::pair<double, Override> apply_overrides(double base, const features::FeatureVector& fv) {
    // Non-existing components make an answer untrue regardless of anything
    // else, so this rule precedes the guide rule.
    if (fv.at(features::FeatureName::ComponentsDefined).override_signal)
        return {1.0, Override::ComponentFail};
    if (fv.at(features::FeatureName::VerbatimGuide).override_signal)
        return {5.0, Override::GuideMatch};
    return {base, Override::None};
}

std::pair<double, Override> score_excluding(const features::FeatureVector& fv,
                                            features::FeatureName excluded) {
    double sum = 0.0;
    for (auto name : features::kAllFeatures)
        if (name != excluded) sum += fv.at(name).value;
    double base = 1.0 + 4.0 * sum / 6.0;

    if (excluded != features::FeatureName::ComponentsDefined &&
        fv.at(features::FeatureName::ComponentsDefined).override_signal)
        return {1.0, Override::ComponentFail};
    if (excluded != features::FeatureName::VerbatimGuide &&
        fv.at(features::FeatureName::VerbatimGuide).override_signal)
        return {5.0, Override::GuideMatch};
    return {base, Override::None};
}

ScoreResult score_record(const features::ScoringInput& input, const ScoringContext& ctx) {
    ScoreResult result;
    result.record_id = input.original.id;
    result.message_type = classify::classify_message(input.original.message, ctx.rules);

    if (!classify::is_scorable(result.message_type)) {
        result.abstained = true;
        return result;
    }

    result.abstained = false;
    try {
        features::FeatureVector fv = features::extract_all(input, ctx.extraction);
        auto [score, applied] = apply_overrides(to_scale(aggregate(fv)), fv);
        result.score = score;
        result.override_applied = applied;
        result.features = std::move(fv);
    } catch (const Error& e) {
        throw Error("record " + input.original.id + ": " + e.what());
    }
    return result;
}

json scored_record_json(const corpus::Record& r, const ScoreResult& res) {
    json j = corpus::record_to_json(r);
    j["schema_version"] = kSchemaVersion;
    j["message_type"] = classify::to_string(res.message_type);
    j["abstained"] = res.abstained;
    if (res.score)
        j["score"] = *res.score;
    else
        j["score"] = nullptr;
    j["override"] = to_string(res.override_applied);
    if (res.features) {
        json values = json::object();
        json diagnostics = json::object();
        for (auto name : features::kAllFeatures) {
            const auto& fv = res.features->at(name);
            values[features::to_string(name)] = fv.value;
            diagnostics[features::to_string(name)] = fv.diagnostics;
        }
        j["features"] = values;
        j["diagnostics"] = diagnostics;
    }
    return j;
}

} // namespace veracity::scoring
