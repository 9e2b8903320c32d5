#include "strokefusion/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "strokefusion/error.hpp"

namespace strokefusion {

std::string_view to_string(TestMethod method)
{
    return method == TestMethod::exact ? "exact" : "normal_approx";
}

namespace {

struct RankedDifferences {
    std::vector<long long> twice_ranks;  // rank * 2, integral even with average ranks
    std::vector<bool> positive;
    std::vector<std::size_t> tie_sizes;
};

RankedDifferences rank_differences(const std::vector<double>& diffs)
{
    std::vector<std::size_t> order(diffs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(diffs[a]) < std::fabs(diffs[b]);
    });

    RankedDifferences out;
    out.twice_ranks.resize(diffs.size());
    out.positive.resize(diffs.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && std::fabs(diffs[order[j]]) == std::fabs(diffs[order[i]])) ++j;
        // positions i..j-1 share rank ((i+1) + j) / 2
        const auto twice = static_cast<long long>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) out.twice_ranks[order[k]] = twice;
        out.tie_sizes.push_back(j - i);
        i = j;
    }
    for (std::size_t i = 0; i < diffs.size(); ++i) out.positive[i] = diffs[i] > 0.0;
    return out;
}

double exact_two_sided(const RankedDifferences& ranked, long long twice_w)
{
    const long long total = std::accumulate(ranked.twice_ranks.begin(), ranked.twice_ranks.end(), 0LL);
    // counts[s]: sign assignments whose positive ranks sum to s/2
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    long long reach = 0;
    for (auto r : ranked.twice_ranks) {
        for (long long s = reach; s >= 0; --s) {
            if (counts[s] != 0.0) counts[s + r] += counts[s];
        }
        reach += r;
    }
    const double all = std::ldexp(1.0, static_cast<int>(ranked.twice_ranks.size()));
    double lower = 0.0, upper = 0.0;
    for (long long s = 0; s <= total; ++s) {
        if (s <= twice_w) lower += counts[s];
        if (s >= twice_w) upper += counts[s];
    }
    return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

double normal_two_sided(const RankedDifferences& ranked, double w)
{
    const double n = static_cast<double>(ranked.twice_ranks.size());
    const double mean = n * (n + 1.0) / 4.0;
    double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    for (auto t : ranked.tie_sizes) {
        const double td = static_cast<double>(t);
        variance -= (td * td * td - td) / 48.0;
    }
    if (variance <= 0.0) return 1.0;
    const double deviation = std::max(0.0, std::fabs(w - mean) - 0.5);
    const double z = deviation / std::sqrt(variance);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

} // namespace

TestResult wilcoxon_signed_rank(const PairedSample& sample)
{
    if (sample.a.size() != sample.b.size())
        throw ValidationError("wilcoxon: paired samples differ in length (" +
                              std::to_string(sample.a.size()) + " vs " +
                              std::to_string(sample.b.size()) + ")");
    if (sample.a.empty()) throw ValidationError("wilcoxon: empty sample");

    std::vector<double> diffs;
    for (std::size_t i = 0; i < sample.a.size(); ++i) {
        if (!std::isfinite(sample.a[i]) || !std::isfinite(sample.b[i]))
            throw ValidationError("wilcoxon: non-finite value at pair " + std::to_string(i));
        const double d = sample.a[i] - sample.b[i];
        if (d != 0.0) diffs.push_back(d);
    }

    TestResult result;
    result.n_effective = diffs.size();
    if (diffs.empty()) {
        result.all_zero = true;
        return result;
    }

    const auto ranked = rank_differences(diffs);
    long long twice_w = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        if (ranked.positive[i]) twice_w += ranked.twice_ranks[i];
    }
    result.statistic = static_cast<double>(twice_w) / 2.0;
    if (diffs.size() <= exact_wilcoxon_limit) {
        result.method = TestMethod::exact;
        result.p_value = exact_two_sided(ranked, twice_w);
    } else {
        result.method = TestMethod::normal_approx;
        result.p_value = normal_two_sided(ranked, result.statistic);
    }
    return result;
}

} // namespace strokefusion
