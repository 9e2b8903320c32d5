#include "strokefusion/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/normal.hpp>

#include "strokefusion/error.hpp"
#include "strokefusion/random.hpp"

namespace strokefusion {

namespace {

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double normal_quantile(double p)
{
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

// Copula draw: correlation rho with the outcome latent.
double correlated(double latent, double rho, Rng& rng)
{
    return rho * latent + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * rng.normal();
}

std::string patient_id(std::size_t index, std::size_t count)
{
    const std::string digits = std::to_string(index + 1);
    const std::size_t width = std::max<std::size_t>(3, std::to_string(count).size());
    return "S" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

} // namespace

void SyntheticSpec::check() const
{
    if (n_patients < 1) throw ConfigError("n_patients must be at least 1");
    if (!(prevalence_poor > 0.0 && prevalence_poor < 1.0))
        throw ConfigError("prevalence_poor must lie in (0,1)");
    if (module_names.empty()) throw ConfigError("at least one module is required");
    if (std::set<std::string>(module_names.begin(), module_names.end()).size() != module_names.size())
        throw ConfigError("module names must be unique");
    if (target_auc.size() != module_names.size())
        throw ConfigError("target_auc has " + std::to_string(target_auc.size()) + " entries for " +
                          std::to_string(module_names.size()) + " modules");
    for (double a : target_auc) {
        if (!(a > 0.5 && a < 1.0)) throw ConfigError("every target AUC must lie in (0.5,1)");
    }
    for (double rho : {rho_age, rho_nihss}) {
        if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("covariate correlation must lie in [0,1]");
    }
}

double binormal_separation(double target_auc)
{
    return std::sqrt(2.0) * normal_quantile(target_auc);
}

Cohort generate(const SyntheticSpec& spec)
{
    spec.check();
    std::vector<double> half_gap;
    for (double a : spec.target_auc) half_gap.push_back(0.5 * binormal_separation(a));
    const double cut = normal_quantile(1.0 - spec.prevalence_poor);

    Cohort cohort;
    cohort.module_names = spec.module_names;
    cohort.patients.reserve(spec.n_patients);
    for (std::size_t i = 0; i < spec.n_patients; ++i) {
        Rng rng(derive_seed(spec.seed, i));
        const double latent = rng.normal();
        const bool poor = latent > cut;

        PatientRecord r;
        r.id = patient_id(i, spec.n_patients);
        const double age_u = normal_cdf(correlated(latent, spec.rho_age, rng));
        r.age = std::round((20.0 + 75.0 * age_u) * 10.0) / 10.0;
        const double nihss_u = normal_cdf(correlated(latent, spec.rho_nihss, rng));
        r.nihss = std::min(42, static_cast<int>(std::floor(43.0 * nihss_u)));
        r.mrs = poor ? 3 + static_cast<int>(rng.below(4)) : static_cast<int>(rng.below(3));
        for (double h : half_gap) {
            const double score = rng.normal() + (poor ? h : -h);
            r.module_probs.push_back(1.0 / (1.0 + std::exp(-score)));
        }
        cohort.patients.push_back(std::move(r));
    }
    return cohort;
}

} // namespace strokefusion
