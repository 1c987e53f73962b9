#pragma once

#include <optional>
#include <string>
#include <utility>

#include <nlohmann/json_fwd.hpp>

#include "veracity/classify.hpp"
#include "veracity/features.hpp"

namespace veracity::scoring {

enum class Override { None, ComponentFail, GuideMatch };

std::string to_string(Override o);

/// Outcome of scoring one record. A record is abstained exactly when its
/// message type is neither Binary nor Instruction; abstained results carry
/// no score and no features.
struct ScoreResult {
    std::string record_id;
    classify::MessageType message_type = classify::MessageType::Unspecified;
    bool abstained = true;
    std::optional<double> score;
    Override override_applied = Override::None;
    std::optional<features::FeatureVector> features;
};

/// Sum of the seven feature values, in [0, 7].
double aggregate(const features::FeatureVector& fv);

/// Affine map of the attainable sum range onto the 1-5 rating scale.
double to_scale(double sum);

/// Hard rules from the decision-tree analysis: an undefined component
/// forces 1, a verbatim guide match forces 5. The component rule wins when
/// both fire.
std::pair<double, Override> apply_overrides(double base, const features::FeatureVector& fv);

/// Rescores an already-extracted vector with one feature removed: the sum
/// renormalizes over the remaining six and the excluded feature's override
/// is disabled. Used by the ablation study.
std::pair<double, Override> score_excluding(const features::FeatureVector& fv,
                                            features::FeatureName excluded);

struct ScoringContext {
    classify::TypeRules rules;
    features::ExtractionContext extraction;

    ScoringContext(classify::TypeRules r, features::ExtractionContext e)
        : rules(std::move(r)), extraction(std::move(e)) {}
};

/// classify -> abstain unless Binary/Instruction -> extract -> sum ->
/// scale -> overrides.
ScoreResult score_record(const features::ScoringInput& input, const ScoringContext& ctx);

/// The input record plus scoring outcome as one output object.
nlohmann::json scored_record_json(const corpus::Record& r, const ScoreResult& res);

} // namespace veracity::scoring
