#include "strokefusion/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "strokefusion/error.hpp"
#include "strokefusion/random.hpp"

namespace strokefusion {

void CvPlan::check(std::size_t cohort_size) const
{
    if (k < 2) throw ConfigError("k must be at least 2");
    if (n_runs < 1) throw ConfigError("runs must be at least 1");
    if (k > cohort_size)
        throw ConfigError("k = " + std::to_string(k) + " exceeds the cohort size " +
                          std::to_string(cohort_size));
}

std::uint64_t run_seed(const CvPlan& plan, std::size_t run_index)
{
    return derive_seed(plan.base_seed, run_index);
}

std::vector<Fold> make_folds(const Cohort& cohort, const CvPlan& plan, std::size_t run_index)
{
    const std::size_t n = cohort.patients.size();
    plan.check(n);
    const auto truths = outcomes(cohort);

    Rng rng(run_seed(plan, run_index));
    std::vector<std::size_t> order;
    order.reserve(n);
    if (plan.stratified) {
        std::vector<std::size_t> poor, good;
        for (std::size_t i = 0; i < n; ++i) (truths[i] == Outcome::poor ? poor : good).push_back(i);
        shuffle(poor, rng);
        shuffle(good, rng);
        order.insert(order.end(), poor.begin(), poor.end());
        order.insert(order.end(), good.begin(), good.end());
    } else {
        for (std::size_t i = 0; i < n; ++i) order.push_back(i);
        shuffle(order, rng);
    }

    std::vector<std::size_t> fold_of(n);
    for (std::size_t pos = 0; pos < n; ++pos) fold_of[order[pos]] = pos % plan.k;

    std::vector<Fold> folds(plan.k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < plan.k; ++f) (fold_of[i] == f ? folds[f].test : folds[f].train).push_back(i);
    }

    for (std::size_t f = 0; f < plan.k; ++f) {
        bool has_good = false, has_poor = false;
        for (auto i : folds[f].train) (truths[i] == Outcome::poor ? has_poor : has_good) = true;
        if (!has_good || !has_poor) {
            throw ValidationError("training fold " + std::to_string(f) + " of run " +
                                  std::to_string(run_index) + " lacks a class" +
                                  (plan.stratified ? " (too few patients of one class)"
                                                   : "; enable stratified folds"));
        }
    }
    return folds;
}

const MeasureStats& RunSummary::stat(Measure measure) const
{
    return stats[static_cast<std::size_t>(measure)];
}

std::vector<std::uint64_t> RunSummary::seed_schedule() const
{
    std::vector<std::uint64_t> seeds;
    for (const auto& r : runs) seeds.push_back(r.seed);
    return seeds;
}

namespace {

void aggregate(RunSummary& summary)
{
    summary.n_ok = 0;
    for (const auto& r : summary.runs) summary.n_ok += r.ok;
    if (summary.n_ok == 0) return;
    for (auto m : all_measures) {
        double sum = 0.0;
        for (const auto& r : summary.runs) {
            if (r.ok) sum += r.metrics.get(m);
        }
        const double mean = sum / static_cast<double>(summary.n_ok);
        double ss = 0.0;
        for (const auto& r : summary.runs) {
            if (r.ok) ss += (r.metrics.get(m) - mean) * (r.metrics.get(m) - mean);
        }
        auto& s = summary.stats[static_cast<std::size_t>(m)];
        s.mean = mean;
        s.std = summary.n_ok > 1 ? std::sqrt(ss / static_cast<double>(summary.n_ok - 1)) : 0.0;
    }
}

RunRecord evaluate_run(const Cohort& cohort, const std::vector<Outcome>& truths,
                       const CvPlan& plan, const FusionConfig& config, std::size_t run_index)
{
    RunRecord record;
    record.run_index = run_index;
    record.seed = run_seed(plan, run_index);
    try {
        const auto folds = make_folds(cohort, plan, run_index);
        const std::size_t n = cohort.patients.size();
        std::vector<double> fused(n);
        std::vector<Outcome> predicted(n);
        for (std::size_t f = 0; f < folds.size(); ++f) {
            const auto model = fit_fusion(subset(cohort, folds[f].train), config);
            FoldThresholds thresholds;
            thresholds.fold = f;
            thresholds.n_train = folds[f].train.size();
            thresholds.n_test = folds[f].test.size();
            thresholds.tau = model.tau;
            thresholds.tau_star = model.tau_star;
            if (model.normalizer) {
                thresholds.norm_min = model.normalizer->min();
                thresholds.norm_max = model.normalizer->max();
            }
            record.folds.push_back(thresholds);
            for (auto i : folds[f].test) {
                const auto result = fuse_case(fusion_input(cohort.patients[i]), model);
                fused[i] = result.fused_probability;
                predicted[i] = result.final_label;
            }
        }
        record.metrics = evaluate_predictions(fused, predicted, truths);
        record.ok = true;
    } catch (const ValidationError& e) {
        record.error = e.what();
    } catch (const ConfigError& e) {
        record.error = e.what();
    }
    return record;
}

} // namespace

RunSummary evaluate_model(const Cohort& cohort, const CvPlan& plan, const FusionConfig& config,
                          std::string model_name)
{
    config.check();
    require_labeled(cohort);
    plan.check(cohort.patients.size());
    const auto truths = outcomes(cohort);

    RunSummary summary;
    summary.model = std::move(model_name);
    summary.config = config;
    summary.plan = plan;
    for (std::size_t run = 0; run < plan.n_runs; ++run)
        summary.runs.push_back(evaluate_run(cohort, truths, plan, config, run));
    aggregate(summary);
    return summary;
}

std::vector<RunSummary> evaluate_per_module(const Cohort& cohort, const CvPlan& plan,
                                            const FusionConfig& config)
{
    const auto module_config = unweighted_config(config);
    std::vector<RunSummary> out;
    for (std::size_t m = 0; m < cohort.module_names.size(); ++m)
        out.push_back(evaluate_model(single_module(cohort, m), plan, module_config, cohort.module_names[m]));
    return out;
}

TestResult compare_models(const RunSummary& a, const RunSummary& b, Measure measure)
{
    if (a.runs.size() != b.runs.size())
        throw ValidationError("cannot compare " + a.model + " (" + std::to_string(a.runs.size()) +
                              " runs) with " + b.model + " (" + std::to_string(b.runs.size()) +
                              " runs)");
    if (a.seed_schedule() != b.seed_schedule())
        throw ValidationError("cannot compare " + a.model + " with " + b.model +
                              ": seed schedules differ");
    PairedSample sample;
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        if (!a.runs[i].ok || !b.runs[i].ok)
            throw ValidationError("cannot compare: run " + std::to_string(i) + " failed");
        sample.a.push_back(a.runs[i].metrics.get(measure));
        sample.b.push_back(b.runs[i].metrics.get(measure));
    }
    return wilcoxon_signed_rank(sample);
}

const RunSummary& CvReport::model(std::string_view name) const
{
    for (const auto& m : models) {
        if (m.model == name) return m;
    }
    throw ConfigError("no model named '" + std::string(name) + "' in the report");
}

std::string unweighted_model_name()
{
    return "ensemble";
}

std::string weighted_model_name(ClinicalVariable variable)
{
    return "ensemble_w_" + std::string(to_string(variable));
}

CvReport run_cv(const Cohort& cohort, const CvPlan& plan, const FusionConfig& config)
{
    config.check();
    require_labeled(cohort);
    CvReport report;
    report.config = config;
    report.plan = plan;
    report.models = evaluate_per_module(cohort, plan, config);
    report.models.push_back(evaluate_model(cohort, plan, unweighted_config(config), unweighted_model_name()));
    if (config.variable != ClinicalVariable::none)
        report.models.push_back(evaluate_model(cohort, plan, config, weighted_model_name(config.variable)));
    return report;
}

std::string render_table(const CvReport& report, bool csv)
{
    std::ostringstream out;
    char buf[64];
    if (csv) {
        out << "model,measure,mean,std,n_ok\n";
        for (const auto& m : report.models) {
            for (auto measure : all_measures) {
                out << m.model << ',' << to_string(measure) << ',';
                if (m.n_ok > 0) {
                    std::snprintf(buf, sizeof buf, "%.6f,%.6f", m.stat(measure).mean, m.stat(measure).std);
                    out << buf;
                } else {
                    out << ',';
                }
                out << ',' << m.n_ok << '\n';
            }
        }
        return out.str();
    }

    int width = 16;
    for (const auto& m : report.models) width = std::max(width, static_cast<int>(m.model.size()) + 2);
    std::snprintf(buf, sizeof buf, "%-12s", "");
    out << buf;
    for (const auto& m : report.models) {
        std::snprintf(buf, sizeof buf, "%*s", width, m.model.c_str());
        out << buf;
    }
    out << '\n';
    for (auto measure : all_measures) {
        std::snprintf(buf, sizeof buf, "%-12s", std::string(to_string(measure)).c_str());
        out << buf;
        for (const auto& m : report.models) {
            char cell[48];
            if (m.n_ok > 0) std::snprintf(cell, sizeof cell, "%.2f +/- %.2f", m.stat(measure).mean, m.stat(measure).std);
            else std::snprintf(cell, sizeof cell, "failed");
            std::snprintf(buf, sizeof buf, "%*s", width, cell);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

} // namespace strokefusion
