#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace strokefusion {

struct PairedSample {
    std::vector<double> a;
    std::vector<double> b;
};

enum class TestMethod { exact, normal_approx };

std::string_view to_string(TestMethod method);

struct TestResult {
    double statistic = 0.0;  // W+, sum of ranks of positive differences
    double p_value = 1.0;
    std::size_t n_effective = 0;
    TestMethod method = TestMethod::exact;
    bool all_zero = false;
};

/// Largest number of non-zero differences handled by the exact null distribution.
inline constexpr std::size_t exact_wilcoxon_limit = 25;

/// Two-sided Wilcoxon signed-rank test on a - b. Zero differences are dropped,
/// tied |d| get average ranks. The exact null is used up to
/// exact_wilcoxon_limit, beyond that a normal approximation with tie and
/// continuity correction. p = min(1, 2 min(P(W <= w), P(W >= w))).
TestResult wilcoxon_signed_rank(const PairedSample& sample);

} // namespace strokefusion
