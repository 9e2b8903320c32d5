#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "strokefusion/cohort.hpp"
#include "strokefusion/fusion.hpp"
#include "strokefusion/metrics.hpp"
#include "strokefusion/wilcoxon.hpp"

namespace strokefusion {

struct CvPlan {
    std::size_t k = 5;
    std::size_t n_runs = 10;
    std::uint64_t base_seed = 0;
    bool stratified = true;

    void check(std::size_t cohort_size) const;
};

/// Seed of run `run_index`; the only source of run-to-run variation.
std::uint64_t run_seed(const CvPlan& plan, std::size_t run_index);

struct Fold {
    std::vector<std::size_t> train;  // indices into the cohort, ascending
    std::vector<std::size_t> test;
};

/// Partition of the cohort into plan.k test folds. Stratified plans deal each
/// class round-robin so fold class counts differ by at most one. Throws
/// ValidationError if some training fold lacks a class.
std::vector<Fold> make_folds(const Cohort& cohort, const CvPlan& plan, std::size_t run_index);

struct FoldThresholds {
    std::size_t fold = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::optional<double> tau;
    double tau_star = 0.0;
    std::optional<double> norm_min;
    std::optional<double> norm_max;
};

struct RunRecord {
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;         // set when !ok
    MetricReport metrics;      // pooled over the test folds
    std::vector<FoldThresholds> folds;
};

struct MeasureStats {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for a single run
};

struct RunSummary {
    std::string model;
    FusionConfig config;
    CvPlan plan;
    std::vector<RunRecord> runs;
    std::size_t n_ok = 0;
    std::array<MeasureStats, all_measures.size()> stats{};  // valid when n_ok > 0

    const MeasureStats& stat(Measure measure) const;
    std::vector<std::uint64_t> seed_schedule() const;
};

/// Cross-validated evaluation of one fusion configuration. Thresholds and
/// bounds are fitted on training folds; test folds are scored unlabeled and
/// pooled per run. Run-level failures are recorded, not thrown.
RunSummary evaluate_model(const Cohort& cohort, const CvPlan& plan, const FusionConfig& config,
                          std::string model_name = "ensemble");

/// Each module on its own, thresholded with the strategy of `config`.
std::vector<RunSummary> evaluate_per_module(const Cohort& cohort, const CvPlan& plan,
                                            const FusionConfig& config = {});

/// Wilcoxon on the paired per-run values of `measure`. Throws ValidationError
/// unless both summaries have the same seed schedule and no failed runs.
TestResult compare_models(const RunSummary& a, const RunSummary& b, Measure measure);

/// Every module, the unweighted ensemble, and the covariate-weighted ensemble
/// when config.variable is set.
struct CvReport {
    FusionConfig config;
    CvPlan plan;
    std::vector<RunSummary> models;

    const RunSummary& model(std::string_view name) const;
};

CvReport run_cv(const Cohort& cohort, const CvPlan& plan, const FusionConfig& config);

std::string unweighted_model_name();
std::string weighted_model_name(ClinicalVariable variable);

/// mean +/- std per measure and model; CSV or aligned text.
std::string render_table(const CvReport& report, bool csv);

} // namespace strokefusion
