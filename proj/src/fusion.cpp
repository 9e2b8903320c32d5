#include "strokefusion/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "strokefusion/error.hpp"

namespace strokefusion {

std::string_view to_string(ThresholdStrategy strategy)
{
    switch (strategy) {
    case ThresholdStrategy::youden: return "youden";
    case ThresholdStrategy::max_accuracy: return "max_accuracy";
    case ThresholdStrategy::fixed: return "fixed";
    }
    return "youden";
}

ThresholdStrategy parse_threshold_strategy(std::string_view name)
{
    if (name == "youden") return ThresholdStrategy::youden;
    if (name == "max_accuracy") return ThresholdStrategy::max_accuracy;
    if (name == "fixed") return ThresholdStrategy::fixed;
    throw ConfigError("unknown threshold strategy '" + std::string(name) +
                      "' (expected youden, max_accuracy or fixed)");
}

void FusionConfig::check() const
{
    auto in_open_unit = [](double v) { return std::isfinite(v) && v > 0.0 && v < 1.0; };
    if (tau && !in_open_unit(*tau)) throw ConfigError("tau must lie in (0,1)");
    if (tau_star && !in_open_unit(*tau_star)) throw ConfigError("tau_star must lie in (0,1)");
    if (norm_min.has_value() != norm_max.has_value())
        throw ConfigError("norm_min and norm_max must be given together");
    if (norm_min) {
        if (variable == ClinicalVariable::none)
            throw ConfigError("normalization bounds given but no clinical variable selected");
        ClinicalNormalizer(variable, *norm_min, *norm_max);
    }
    if (strategy == ThresholdStrategy::fixed) {
        if (!tau_star) throw ConfigError("strategy 'fixed' requires tau_star");
        if (variable != ClinicalVariable::none && !tau)
            throw ConfigError("strategy 'fixed' requires tau");
    }
}

FusionConfig unweighted_config(FusionConfig config)
{
    config.variable = ClinicalVariable::none;
    config.norm_min.reset();
    config.norm_max.reset();
    config.tau.reset();
    return config;
}

FusionInput fusion_input(const PatientRecord& record)
{
    return {record.module_probs, record.age, record.nihss};
}

std::vector<Outcome> derive_labels(std::span<const double> probs, double tau)
{
    std::vector<Outcome> labels;
    labels.reserve(probs.size());
    for (double p : probs) labels.push_back(p <= tau ? Outcome::good : Outcome::poor);
    return labels;
}

std::vector<double> compute_weights(std::span<const Outcome> labels, double c)
{
    if (labels.empty()) throw ValidationError("compute_weights: no module labels");
    if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("compute_weights: c outside [0,1]");

    std::vector<double> weights;
    weights.reserve(labels.size());
    for (auto label : labels) weights.push_back(label == Outcome::poor ? c : 1.0 - c);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total == 0.0) {
        // c in {0,1} and every module on the zero-weight side.
        std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(labels.size()));
        return weights;
    }
    for (auto& w : weights) w /= total;
    return weights;
}

double fuse(std::span<const double> probs, std::span<const double> weights)
{
    if (probs.size() != weights.size())
        throw ValidationError("fuse: " + std::to_string(probs.size()) + " probabilities but " +
                              std::to_string(weights.size()) + " weights");
    if (probs.empty()) throw ValidationError("fuse: no probabilities");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::fabs(total - 1.0) > 1e-9) throw ValidationError("fuse: weights do not sum to 1");

    double fused = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) fused += weights[i] * probs[i];
    const auto [lo, hi] = std::minmax_element(probs.begin(), probs.end());
    return std::clamp(fused, *lo, *hi);
}

Outcome classify(double fused, double tau_star)
{
    return fused <= tau_star ? Outcome::good : Outcome::poor;
}

double search_threshold(std::span<const double> scores, std::span<const Outcome> truths,
                        ThresholdStrategy strategy)
{
    if (strategy == ThresholdStrategy::fixed)
        throw ConfigError("threshold search requested with the fixed strategy");
    if (scores.size() != truths.size())
        throw ValidationError("threshold search: scores and truths differ in length");

    struct Point {
        double score;
        Outcome truth;
    };
    std::vector<Point> points;
    points.reserve(scores.size());
    long long n_poor = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        points.push_back({scores[i], truths[i]});
        n_poor += truths[i] == Outcome::poor;
    }
    const long long n_good = static_cast<long long>(points.size()) - n_poor;
    if (n_poor == 0 || n_good == 0)
        throw ValidationError("threshold search: degenerate class distribution");
    std::sort(points.begin(), points.end(),
              [](const Point& a, const Point& b) { return a.score < b.score; });
    if (points.front().score == points.back().score)
        throw ValidationError("threshold search: all scores identical");

    std::vector<double> candidates{0.0};
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].score != points[i - 1].score)
            candidates.push_back(0.5 * (points[i - 1].score + points[i].score));
    }
    candidates.push_back(1.0);

    // Sweep: everything at or below the candidate is predicted good.
    std::size_t next = 0;
    long long good_below = 0, poor_below = 0;
    double best = candidates.front();
    long long best_value = 0;
    bool have_best = false;
    for (double t : candidates) {
        while (next < points.size() && points[next].score <= t) {
            (points[next].truth == Outcome::good ? good_below : poor_below) += 1;
            ++next;
        }
        const long long tp = n_poor - poor_below;
        const long long tn = good_below;
        // Youden's J scaled by n_poor * n_good stays integral.
        const long long value = strategy == ThresholdStrategy::youden
                                    ? tp * n_good + tn * n_poor - n_poor * n_good
                                    : tp + tn;
        if (!have_best || value > best_value) {
            best = t;
            best_value = value;
            have_best = true;
        }
    }
    return best;
}

FusionResult fuse_case(const FusionInput& input, const FusionModel& model)
{
    if (input.probs.empty()) throw ValidationError("fusion: no module probabilities");
    for (double p : input.probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("fusion: probability outside [0,1]");
    }

    FusionResult result;
    if (model.tau) result.preliminary_labels = derive_labels(input.probs, *model.tau);
    if (model.normalizer) {
        if (!model.tau) throw ConfigError("weighted fusion needs a preliminary threshold");
        const double raw = model.normalizer->variable() == ClinicalVariable::age
                               ? input.age
                               : static_cast<double>(input.nihss);
        result.weights = compute_weights(result.preliminary_labels, (*model.normalizer)(raw));
    } else {
        result.weights.assign(input.probs.size(), 1.0 / static_cast<double>(input.probs.size()));
    }
    result.fused_probability = fuse(input.probs, result.weights);
    result.final_label = classify(result.fused_probability, model.tau_star);
    return result;
}

FusionResult fuse_patient(const PatientRecord& record, const FusionModel& model)
{
    return fuse_case(fusion_input(record), model);
}

FusionModel fit_fusion(const Cohort& training, const FusionConfig& config)
{
    config.check();
    if (training.patients.empty()) throw ValidationError("cannot fit fusion on an empty cohort");

    std::optional<std::vector<Outcome>> truths;
    auto labels = [&]() -> const std::vector<Outcome>& {
        if (!truths) truths = outcomes(training);
        return *truths;
    };

    FusionModel model;
    model.tau = config.tau;
    if (config.variable != ClinicalVariable::none) {
        double lo = 0.0, hi = 0.0;
        if (config.norm_min) {
            lo = *config.norm_min;
            hi = *config.norm_max;
        } else {
            lo = hi = clinical_value(training.patients.front(), config.variable);
            for (const auto& p : training.patients) {
                lo = std::min(lo, clinical_value(p, config.variable));
                hi = std::max(hi, clinical_value(p, config.variable));
            }
            if (!(hi > lo)) {
                std::ostringstream msg;
                msg << "cannot derive " << to_string(config.variable)
                    << " bounds: every training patient has the value " << lo;
                throw ConfigError(msg.str());
            }
        }
        model.normalizer.emplace(config.variable, lo, hi);

        if (!model.tau) {
            const auto& y = labels();
            std::vector<double> pooled;
            std::vector<Outcome> pooled_truth;
            for (std::size_t i = 0; i < training.patients.size(); ++i) {
                for (double p : training.patients[i].module_probs) {
                    pooled.push_back(p);
                    pooled_truth.push_back(y[i]);
                }
            }
            model.tau = search_threshold(pooled, pooled_truth, config.strategy);
        }
    }

    if (config.tau_star) {
        model.tau_star = *config.tau_star;
    } else {
        std::vector<double> fused;
        fused.reserve(training.patients.size());
        for (const auto& p : training.patients) fused.push_back(fuse_patient(p, model).fused_probability);
        model.tau_star = search_threshold(fused, labels(), config.strategy);
    }
    return model;
}

} // namespace strokefusion
