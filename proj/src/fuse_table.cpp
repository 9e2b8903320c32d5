#include "strokefusion/fuse_table.hpp"

#include <cstdio>

#include "strokefusion/cohort_io.hpp"
#include "strokefusion/error.hpp"
#include "strokefusion/json_io.hpp"

namespace strokefusion {

namespace {

std::string fixed6(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

Json model_json(const FusionModel& model)
{
    Json doc;
    doc["variable"] = std::string(to_string(model.normalizer ? model.normalizer->variable()
                                                              : ClinicalVariable::none));
    doc["norm_min"] = model.normalizer ? Json(model.normalizer->min()) : Json(nullptr);
    doc["norm_max"] = model.normalizer ? Json(model.normalizer->max()) : Json(nullptr);
    doc["tau"] = model.tau ? Json(*model.tau) : Json(nullptr);
    doc["tau_star"] = model.tau_star;
    return doc;
}

} // namespace

FuseTable fuse_table(const Cohort& cohort, const FusionConfig& config)
{
    const auto violations = validate_cohort(cohort);
    if (!violations.empty()) {
        std::string msg = "cohort failed validation:";
        for (const auto& v : violations) msg += "\n" + format_violation(v);
        throw ValidationError(msg);
    }

    FuseTable table;
    table.module_names = cohort.module_names;
    table.weighted = fit_fusion(cohort, config);
    table.unweighted = fit_fusion(cohort, unweighted_config(config));
    for (const auto& p : cohort.patients) {
        const auto w = fuse_patient(p, table.weighted);
        const auto u = fuse_patient(p, table.unweighted);
        table.rows.push_back({p.id, p.module_probs, w.weights, w.fused_probability,
                              u.fused_probability, u.final_label, w.final_label});
    }
    return table;
}

std::string render_fuse_csv(const FuseTable& table)
{
    std::string out = "patient_id";
    for (const auto& m : table.module_names) out += ",p_" + m;
    for (const auto& m : table.module_names) out += ",w_" + m;
    out += ",p_mrs,label_unweighted,label_weighted\n";
    for (const auto& r : table.rows) {
        out += csv_field(r.patient_id);
        for (double p : r.probs) out += "," + fixed6(p);
        for (double w : r.weights) out += "," + fixed6(w);
        out += "," + fixed6(r.p_mrs);
        out += "," + std::string(to_string(r.label_unweighted));
        out += "," + std::string(to_string(r.label_weighted)) + "\n";
    }
    return out;
}

std::string render_fuse_json(const FuseTable& table)
{
    Json doc;
    doc["module_names"] = table.module_names;
    doc["weighted_model"] = model_json(table.weighted);
    doc["unweighted_model"] = model_json(table.unweighted);
    Json rows = Json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"patient_id", r.patient_id},
                        {"probs", r.probs},
                        {"weights", r.weights},
                        {"p_mrs", r.p_mrs},
                        {"p_unweighted", r.p_unweighted},
                        {"label_unweighted", std::string(to_string(r.label_unweighted))},
                        {"label_weighted", std::string(to_string(r.label_weighted))}});
    }
    doc["patients"] = rows;
    return doc.dump(2) + "\n";
}

} // namespace strokefusion
