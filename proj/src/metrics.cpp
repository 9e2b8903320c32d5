#include "strokefusion/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "strokefusion/error.hpp"

namespace strokefusion {

namespace {

void require_same_nonempty(std::size_t a, std::size_t b, const char* what)
{
    if (a != b)
        throw ValidationError(std::string(what) + ": inputs differ in length (" +
                              std::to_string(a) + " vs " + std::to_string(b) + ")");
    if (a == 0) throw ValidationError(std::string(what) + ": empty input");
}

double ratio(std::size_t num, std::size_t den, bool& degenerate)
{
    if (den == 0) {
        degenerate = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

ConfusionMetrics confusion_metrics(std::span<const Outcome> predicted,
                                   std::span<const Outcome> truth, Outcome positive)
{
    require_same_nonempty(predicted.size(), truth.size(), "confusion_metrics");
    ConfusionMetrics m;
    auto& c = m.counts;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool pred_pos = predicted[i] == positive;
        const bool true_pos = truth[i] == positive;
        if (pred_pos && true_pos) ++c.tp;
        else if (!pred_pos && true_pos) ++c.fn;
        else if (!pred_pos) ++c.tn;
        else ++c.fp;
    }
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(truth.size());
    m.sensitivity = ratio(c.tp, c.tp + c.fn, m.degenerate);
    m.specificity = ratio(c.tn, c.tn + c.fp, m.degenerate);
    m.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, m.degenerate);
    return m;
}

double mean_absolute_error(std::span<const double> probs, std::span<const Outcome> truth)
{
    require_same_nonempty(probs.size(), truth.size(), "mean_absolute_error");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double y = truth[i] == Outcome::poor ? 1.0 : 0.0;
        total += std::fabs(probs[i] - y);
    }
    return total / static_cast<double>(probs.size());
}

double auc(std::span<const double> scores, std::span<const Outcome> truth)
{
    require_same_nonempty(scores.size(), truth.size(), "auc");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // Walk the ROC curve one tie group at a time; twice the trapezoid area is
    // an integer, so the sum is exact.
    long long poor_seen = 0, good_seen = 0, twice_area = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        long long poor_here = 0, good_here = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (truth[order[j]] == Outcome::poor ? poor_here : good_here) += 1;
            ++j;
        }
        twice_area += good_here * (2 * poor_seen + poor_here);
        poor_seen += poor_here;
        good_seen += good_here;
        i = j;
    }
    if (poor_seen == 0 || good_seen == 0)
        throw ValidationError("AUC undefined: scores cover a single class");
    return static_cast<double>(twice_area) /
           (2.0 * static_cast<double>(poor_seen) * static_cast<double>(good_seen));
}

std::string_view to_string(Measure measure)
{
    switch (measure) {
    case Measure::accuracy: return "accuracy";
    case Measure::sensitivity: return "sensitivity";
    case Measure::specificity: return "specificity";
    case Measure::f1: return "f1";
    case Measure::mae: return "mae";
    case Measure::auc: return "auc";
    }
    return "accuracy";
}

Measure parse_measure(std::string_view name)
{
    for (auto m : all_measures) {
        if (to_string(m) == name) return m;
    }
    throw ConfigError("unknown measure '" + std::string(name) +
                      "' (expected accuracy, sensitivity, specificity, f1, mae or auc)");
}

double MetricReport::get(Measure measure) const
{
    switch (measure) {
    case Measure::accuracy: return accuracy;
    case Measure::sensitivity: return sensitivity;
    case Measure::specificity: return specificity;
    case Measure::f1: return f1;
    case Measure::mae: return mae;
    case Measure::auc: return auc;
    }
    return 0.0;
}

MetricReport evaluate_predictions(std::span<const double> fused_probs,
                                  std::span<const Outcome> predicted,
                                  std::span<const Outcome> truth)
{
    const auto cm = confusion_metrics(predicted, truth, Outcome::poor);
    MetricReport r;
    r.accuracy = cm.accuracy;
    r.sensitivity = cm.sensitivity;
    r.specificity = cm.specificity;
    r.f1 = cm.f1;
    r.degenerate = cm.degenerate;
    r.mae = mean_absolute_error(fused_probs, truth);
    r.auc = strokefusion::auc(fused_probs, truth);
    r.n_patients = truth.size();
    r.positive_class = Outcome::poor;
    return r;
}

} // namespace strokefusion
