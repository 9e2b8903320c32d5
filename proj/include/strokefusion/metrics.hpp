#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "strokefusion/cohort.hpp"

namespace strokefusion {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
};

struct ConfusionMetrics {
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double f1 = 0.0;
    bool degenerate = false;  // some ratio had a zero denominator and was set to 0
    ConfusionCounts counts;
};

ConfusionMetrics confusion_metrics(std::span<const Outcome> predicted,
                                   std::span<const Outcome> truth,
                                   Outcome positive = Outcome::poor);

/// mean |p - y| with good -> 0, poor -> 1.
double mean_absolute_error(std::span<const double> probs, std::span<const Outcome> truth);

/// Probability that a random poor patient scores above a random good one,
/// ties counted half. Computed from the ROC trapezoid in O(n log n).
double auc(std::span<const double> scores, std::span<const Outcome> truth);

enum class Measure { accuracy, sensitivity, specificity, f1, mae, auc };

inline constexpr std::array<Measure, 6> all_measures{
    Measure::accuracy, Measure::sensitivity, Measure::specificity,
    Measure::f1,       Measure::mae,         Measure::auc};

std::string_view to_string(Measure measure);
Measure parse_measure(std::string_view name);

struct MetricReport {
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double f1 = 0.0;
    double mae = 0.0;
    double auc = 0.0;
    std::size_t n_patients = 0;
    Outcome positive_class = Outcome::poor;
    bool degenerate = false;

    double get(Measure measure) const;
};

MetricReport evaluate_predictions(std::span<const double> fused_probs,
                                  std::span<const Outcome> predicted,
                                  std::span<const Outcome> truth);

} // namespace strokefusion
