#pragma once

#include <optional>
#include <span>
#include <vector>

#include "strokefusion/cohort.hpp"

namespace strokefusion {

enum class ThresholdStrategy { youden, max_accuracy, fixed };

std::string_view to_string(ThresholdStrategy strategy);
ThresholdStrategy parse_threshold_strategy(std::string_view name);

/// User-facing fusion settings. Unset bounds are derived from the training
/// cohort; unset thresholds are searched on it.
struct FusionConfig {
    ClinicalVariable variable = ClinicalVariable::nihss;
    std::optional<double> norm_min;
    std::optional<double> norm_max;
    std::optional<double> tau;       // preliminary, shared by all modules
    std::optional<double> tau_star;  // final, on the fused probability
    ThresholdStrategy strategy = ThresholdStrategy::youden;

    /// Throws ConfigError.
    void check() const;
};

/// Same thresholds strategy, no covariate: the plain-average ensemble.
FusionConfig unweighted_config(FusionConfig config);

/// A fitted fusion rule: everything needed to score unseen patients.
struct FusionModel {
    std::optional<ClinicalNormalizer> normalizer;  // absent: unweighted average
    std::optional<double> tau;
    double tau_star = 0.5;
};

/// Unlabeled view of one patient. This is all the fusion stage ever sees of a
/// test patient.
struct FusionInput {
    std::span<const double> probs;
    double age = 0.0;
    int nihss = 0;
};

FusionInput fusion_input(const PatientRecord& record);

struct FusionResult {
    std::vector<Outcome> preliminary_labels;  // empty when the model has no tau
    std::vector<double> weights;
    double fused_probability = 0.0;
    Outcome final_label = Outcome::good;
};

/// good iff p <= tau.
std::vector<Outcome> derive_labels(std::span<const double> probs, double tau);

/// Raw weight c for poor-labeled modules and 1-c for good ones, normalized to
/// sum to one. Falls back to uniform when every raw weight is zero.
std::vector<double> compute_weights(std::span<const Outcome> labels, double c);

/// Weighted average, clamped to [min(probs), max(probs)] against rounding.
double fuse(std::span<const double> probs, std::span<const double> weights);

/// good iff fused <= tau_star.
Outcome classify(double fused, double tau_star);

/// Best operating threshold over {0, 1, midpoints of consecutive distinct
/// scores}; a score above the threshold predicts poor. Ties go to the smallest
/// candidate. Throws ValidationError on single-class truths or when all scores
/// are identical, ConfigError for the fixed strategy.
double search_threshold(std::span<const double> scores, std::span<const Outcome> truths,
                        ThresholdStrategy strategy);

FusionResult fuse_case(const FusionInput& input, const FusionModel& model);
FusionResult fuse_patient(const PatientRecord& record, const FusionModel& model);

/// Resolves bounds and thresholds on `training`. Labels are read only when a
/// threshold has to be searched.
FusionModel fit_fusion(const Cohort& training, const FusionConfig& config);

} // namespace strokefusion
