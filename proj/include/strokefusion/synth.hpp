#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "strokefusion/cohort.hpp"

namespace strokefusion {

struct SyntheticSpec {
    std::size_t n_patients = 119;
    double prevalence_poor = 0.34;
    std::vector<std::string> module_names = default_module_names();
    std::vector<double> target_auc{0.69, 0.64, 0.56, 0.71, 0.58};
    double rho_age = 0.4;
    double rho_nihss = 0.6;
    std::uint64_t seed = 1;

    /// Throws ConfigError.
    void check() const;
};

/// Binormal mean separation giving the requested AUC: sqrt(2) * Phi^-1(auc).
double binormal_separation(double target_auc);

/// Outcome from a latent standard normal thresholded at the prevalence
/// quantile. Module scores are unit-variance Gaussians whose class means sit
/// binormal_separation() apart, squashed by the logistic function. Age and
/// NIHSS come from a Gaussian copula on the same latent with correlation rho.
/// Each patient draws from its own stream derived from the seed.
Cohort generate(const SyntheticSpec& spec);

} // namespace strokefusion
