#pragma once

#include <string>
#include <vector>

#include "strokefusion/cohort.hpp"
#include "strokefusion/fusion.hpp"

namespace strokefusion {

struct FuseRow {
    std::string patient_id;
    std::vector<double> probs;
    std::vector<double> weights;  // weighted rule; uniform when no covariate
    double p_mrs = 0.0;
    double p_unweighted = 0.0;
    Outcome label_unweighted = Outcome::good;
    Outcome label_weighted = Outcome::good;
};

struct FuseTable {
    std::vector<std::string> module_names;
    FusionModel weighted;
    FusionModel unweighted;
    std::vector<FuseRow> rows;
};

/// Fits both rules on the cohort (searching any threshold the config leaves
/// open) and scores every patient. Throws ValidationError on invalid records.
FuseTable fuse_table(const Cohort& cohort, const FusionConfig& config);

std::string render_fuse_csv(const FuseTable& table);
std::string render_fuse_json(const FuseTable& table);

} // namespace strokefusion
