#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "strokefusion/fusion.hpp"
#include "strokefusion/harness.hpp"
#include "strokefusion/metrics.hpp"
#include "strokefusion/synth.hpp"
#include "strokefusion/wilcoxon.hpp"
#include "published_weights.hpp"

using namespace strokefusion;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

struct Criterion {
    std::string id;
    std::string title;
    std::function<Verdict()> check;
    bool informational = false;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double value, int precision = 4)
{
    std::ostringstream out;
    out.precision(precision);
    out << std::fixed << value;
    return out.str();
}

struct TableCheck {
    int weight_misses = 0;
    int unweighted_misses = 0;
    int weighted_misses = 0;
    std::vector<std::string> failures;
};

TableCheck check_published_table(double tau_star)
{
    TableCheck result;
    for (const auto& row : published::published_rows()) {
        const FusionModel weighted{published::published_normalizer(row.variable), published::published_tau, tau_star};
        const FusionModel plain{std::nullopt, std::nullopt, tau_star};
        PatientRecord record{row.id, 0, 0, row.mrs, {row.probs.begin(), row.probs.end()}};
        if (row.variable == ClinicalVariable::age) record.age = row.covariate;
        else record.nihss = static_cast<int>(row.covariate);

        const auto w = fuse_patient(record, weighted);
        const auto u = fuse_patient(record, plain);
        const std::string tag = to_string(row.variable).data() + std::string(" ") + row.id;
        for (std::size_t m = 0; m < 5; ++m) {
            if (std::fabs(w.weights[m] - row.weights[m]) > 0.01 + 1e-12) {
                ++result.weight_misses;
                result.failures.push_back(tag + " w" + std::to_string(m));
            }
        }
        if (u.final_label != row.label_unweighted) {
            ++result.unweighted_misses;
            result.failures.push_back(tag + " unweighted label (P=" + fmt(u.fused_probability) + ")");
        }
        if (w.final_label != row.label_weighted) {
            ++result.weighted_misses;
            result.failures.push_back(tag + " weighted label (P=" + fmt(w.fused_probability) + ")");
        }
    }
    return result;
}

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
    return out;
}

Verdict published_table()
{
    const auto start = Clock::now();
    const auto r = check_published_table(0.40);
    const double elapsed = seconds_since(start);
    const bool pass = r.failures.empty() && elapsed < 1.0;
    std::string detail = "weight misses " + std::to_string(r.weight_misses) + ", unweighted label misses " +
                         std::to_string(r.unweighted_misses) + ", weighted label misses " +
                         std::to_string(r.weighted_misses) + ", " + fmt(elapsed, 3) + " s";
    if (!r.failures.empty()) detail += " [" + join(r.failures) + "]";
    return {pass, detail};
}

Verdict published_table_shifted_threshold()
{
    const auto r = check_published_table(0.42);
    return {r.failures.empty(), "tau*=0.42: " + std::to_string(r.failures.size()) + " mismatches" +
                                    (r.failures.empty() ? "" : " [" + join(r.failures) + "]")};
}

Verdict worked_example()
{
    const std::vector<double> probs{0.68, 0.75, 0.74, 0.07, 0.24};
    const PatientRecord record{"023", 0, 8, 2, probs};
    const auto u = fuse_patient(record, FusionModel{std::nullopt, std::nullopt, 0.40});
    const auto w = fuse_patient(
        record, FusionModel{ClinicalNormalizer(ClinicalVariable::nihss, 0, 26), 0.40, 0.40});
    const bool pass = std::fabs(u.fused_probability - 0.496) <= 0.005 && u.final_label == Outcome::poor &&
                      w.fused_probability <= 0.40 + 0.005 && w.final_label == Outcome::good;
    return {pass, "unweighted P=" + fmt(u.fused_probability) + " (" + std::string(to_string(u.final_label)) +
                      "), weighted P=" + fmt(w.fused_probability) + " (" + std::string(to_string(w.final_label)) + ")"};
}

Verdict wilcoxon_floor()
{
    PairedSample sample;
    for (int i = 0; i < 10; ++i) {
        sample.a.push_back(0.75 + 0.01 * i);
        sample.b.push_back(0.70 + 0.003 * i);
    }
    const auto r = wilcoxon_signed_rank(sample);
    return {std::fabs(r.p_value - 0.001953) <= 1e-6 && r.method == TestMethod::exact,
            "p=" + fmt(r.p_value, 9) + ", W+=" + fmt(r.statistic, 1)};
}

Verdict synthetic_ordering()
{
    const auto start = Clock::now();
    SyntheticSpec spec;
    spec.n_patients = 119;
    spec.prevalence_poor = 0.34;
    spec.rho_nihss = 0.6;
    const auto cohort = generate(spec);
    CvPlan plan;
    plan.n_runs = 10;
    const auto report = run_cv(cohort, plan, FusionConfig{});
    const auto& weighted = report.model(weighted_model_name(ClinicalVariable::nihss));
    const auto& plain = report.model(unweighted_model_name());
    if (weighted.n_ok != plan.n_runs || plain.n_ok != plan.n_runs)
        return {false, "failed runs: weighted " + std::to_string(plan.n_runs - weighted.n_ok) + ", unweighted " +
                           std::to_string(plan.n_runs - plain.n_ok)};
    int wins = 0;
    for (std::size_t i = 0; i < plan.n_runs; ++i)
        wins += weighted.runs[i].metrics.auc > plain.runs[i].metrics.auc;
    double best_module = 0;
    std::string best_name;
    for (const auto& name : spec.module_names) {
        const double mean = report.model(name).stat(Measure::auc).mean;
        if (mean > best_module) {
            best_module = mean;
            best_name = name;
        }
    }
    const double w_mean = weighted.stat(Measure::auc).mean;
    const double elapsed = seconds_since(start);
    const bool pass = wins >= 8 && w_mean - best_module >= 0 && elapsed < 60;
    return {pass, "weighted wins " + std::to_string(wins) + "/10, mean AUC weighted " + fmt(w_mean) +
                      ", unweighted " + fmt(plain.stat(Measure::auc).mean) + ", best module " + best_name + " " +
                      fmt(best_module) + ", " + fmt(elapsed, 2) + " s"};
}

Verdict auc_oracle()
{
    std::mt19937_64 gen(20240401);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + gen() % 49;
        std::vector<double> s(n);
        std::vector<Outcome> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = trial % 3 == 0 ? static_cast<double>(gen() % 5) / 4 : std::ldexp(static_cast<double>(gen() >> 11), -53);
            y[i] = gen() % 2 ? Outcome::poor : Outcome::good;
        }
        y[0] = Outcome::poor;
        y[1] = Outcome::good;
        double wins = 0, pairs = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (y[i] != Outcome::poor || y[j] != Outcome::good) continue;
                pairs += 1;
                wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
            }
        }
        worst = std::max(worst, std::fabs(auc(s, y) - wins / pairs));
    }
    return {worst <= 1e-12, "1000 instances, max |diff| " + std::to_string(worst)};
}

Verdict wilcoxon_enumeration()
{
    std::mt19937_64 gen(77);
    int mismatches = 0, instances = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + gen() % 10;
        std::vector<double> d(n);
        for (auto& v : d) v = static_cast<double>(static_cast<int>(gen() % 11) - 5) * (trial % 2 ? 1.0 : 0.37);
        std::vector<double> nz;
        for (double v : d)
            if (v != 0) nz.push_back(v);
        const std::size_t m = nz.size();
        std::vector<double> rank(m);
        for (std::size_t i = 0; i < m; ++i) {
            double below = 0, equal = 0;
            for (std::size_t j = 0; j < m; ++j) {
                below += std::fabs(nz[j]) < std::fabs(nz[i]);
                equal += std::fabs(nz[j]) == std::fabs(nz[i]);
            }
            rank[i] = below + (equal + 1) / 2;
        }
        double w = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (nz[i] > 0) w += rank[i];
        double p = 1.0;
        if (m > 0) {
            std::size_t le = 0, ge = 0;
            for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
                double s = 0;
                for (std::size_t i = 0; i < m; ++i)
                    if (mask >> i & 1) s += rank[i];
                le += s <= w + 1e-9;
                ge += s >= w - 1e-9;
            }
            p = std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(std::size_t{1} << m));
        }
        const auto r = wilcoxon_signed_rank({d, std::vector<double>(n, 0.0)});
        ++instances;
        if (r.statistic != w || std::fabs(r.p_value - p) > 1e-12) ++mismatches;
    }
    return {mismatches == 0, std::to_string(instances) + " instances, " + std::to_string(mismatches) + " mismatches"};
}

Verdict weight_invariants()
{
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int violations = 0;
    const int cases = 10000;
    for (int trial = 0; trial < cases; ++trial) {
        const std::size_t n = 1 + gen() % 8;
        std::vector<double> probs(n);
        for (auto& p : probs) p = unit(gen);
        const double tau = unit(gen);
        const double c = unit(gen);
        const auto labels = derive_labels(probs, tau);
        const auto w = compute_weights(labels, c);

        const double sum = std::accumulate(w.begin(), w.end(), 0.0);
        if (std::fabs(sum - 1.0) > 1e-9) ++violations;
        if (std::any_of(w.begin(), w.end(), [](double v) { return v < 0; })) ++violations;

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<double> permuted(n);
        for (std::size_t i = 0; i < n; ++i) permuted[i] = probs[perm[i]];
        const auto pw = compute_weights(derive_labels(permuted, tau), c);
        for (std::size_t i = 0; i < n; ++i)
            if (std::fabs(pw[i] - w[perm[i]]) > 1e-15) ++violations;

        for (double v : compute_weights(labels, 0.5))
            if (std::fabs(v - 1.0 / static_cast<double>(n)) > 1e-15) ++violations;

        double c2 = unit(gen);
        double lo = std::min(c, c2), hi = std::max(c, c2);
        if (fuse(probs, compute_weights(labels, lo)) > fuse(probs, compute_weights(labels, hi)) + 1e-12)
            ++violations;
    }
    return {violations == 0, std::to_string(cases) + " cases, " + std::to_string(violations) + " violations"};
}

int run_command(const std::string& command)
{
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict cv_determinism()
{
    const std::string cli = STROKEFUSION_CLI;
    const auto dir = fs::temp_directory_path() / "strokefusion_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto cohort = dir / "cohort.csv";
    const auto config = dir / "run.json";
    std::ofstream(config) << "{\"cohort\": \"" << cohort.string() << "\", \"runs\": 10, \"seed\": 7}\n";
    if (run_command(cli + " synth --out " + cohort.string() + " 2>/dev/null") != 0)
        return {false, "synth failed"};
    for (const char* name : {"a.json", "b.json"}) {
        if (run_command(cli + " cv --config " + config.string() + " --out " + (dir / name).string() +
                        " > /dev/null 2>&1") != 0)
            return {false, "cv failed"};
    }
    const auto a = slurp(dir / "a.json");
    const auto b = slurp(dir / "b.json");
    fs::remove_all(dir);
    return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria{
        {"1", "published weight table at tau=tau*=0.40", published_table},
        {"1-info", "published weight table at tau*=0.42", published_table_shifted_threshold, true},
        {"2", "worked example, patient 023", worked_example},
        {"3", "Wilcoxon floor for 10 one-signed runs", wilcoxon_floor},
        {"4a", "synthetic cohorts: weighted > unweighted, >= best module", synthetic_ordering},
        {"4b", "AUC trapezoid vs pairwise oracle", auc_oracle},
        {"4c", "exact Wilcoxon vs enumeration", wilcoxon_enumeration},
        {"4d", "weight invariants", weight_invariants},
        {"5", "cv determinism", cv_determinism},
    };
    const std::string only = argc > 1 ? argv[1] : "";
    bool all_pass = true;
    bool matched = false;
    for (const auto& c : criteria) {
        if (!only.empty() && c.id != only && !(only == c.id.substr(0, only.size()) && c.informational)) continue;
        matched = true;
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const char* status = c.informational ? (v.pass ? "INFO " : "INFO-FAIL ") : (v.pass ? "PASS " : "FAIL ");
        std::cout << status << c.id << ": " << c.title << " -- " << v.detail << "\n";
        if (!c.informational) all_pass = all_pass && v.pass;
    }
    if (!matched) {
        std::cerr << "unknown criterion '" << only << "'\n";
        return 2;
    }
    return all_pass ? 0 : 1;
}
