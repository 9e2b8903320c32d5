#include "strokefusion/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "strokefusion/error.hpp"

namespace strokefusion {

std::string_view to_string(Outcome outcome)
{
    return outcome == Outcome::good ? "good" : "poor";
}

std::string_view to_string(ClinicalVariable variable)
{
    switch (variable) {
    case ClinicalVariable::none: return "none";
    case ClinicalVariable::age: return "age";
    case ClinicalVariable::nihss: return "nihss";
    }
    return "none";
}

ClinicalVariable parse_clinical_variable(std::string_view name)
{
    if (name == "none") return ClinicalVariable::none;
    if (name == "age") return ClinicalVariable::age;
    if (name == "nihss") return ClinicalVariable::nihss;
    throw ConfigError("unknown clinical variable '" + std::string(name) +
                      "' (expected age, nihss or none)");
}

std::vector<std::string> default_module_names()
{
    return {"adc", "cbf", "cbv", "dwi", "tmax"};
}

Outcome binarize_mrs(int mrs, std::string_view patient_id)
{
    if (mrs < 0 || mrs > 6) {
        std::ostringstream msg;
        msg << "patient " << (patient_id.empty() ? "<unknown>" : patient_id)
            << ": mrs " << mrs << " outside 0..6";
        throw ValidationError(msg.str());
    }
    return mrs <= 2 ? Outcome::good : Outcome::poor;
}

ClinicalNormalizer::ClinicalNormalizer(ClinicalVariable variable, double min, double max)
    : variable_(variable), min_(min), max_(max)
{
    if (variable == ClinicalVariable::none)
        throw ConfigError("a normalizer needs a clinical variable");
    if (!std::isfinite(min) || !std::isfinite(max) || !(max > min)) {
        std::ostringstream msg;
        msg << "normalization bounds for " << to_string(variable) << " need min < max (got "
            << min << ", " << max << ")";
        throw ConfigError(msg.str());
    }
}

double ClinicalNormalizer::operator()(double value) const
{
    return std::clamp((value - min_) / (max_ - min_), 0.0, 1.0);
}

double clinical_value(const PatientRecord& record, ClinicalVariable variable)
{
    switch (variable) {
    case ClinicalVariable::age: return record.age;
    case ClinicalVariable::nihss: return record.nihss;
    case ClinicalVariable::none: break;
    }
    throw ConfigError("no clinical variable selected");
}

std::string format_violation(const Violation& v)
{
    std::string out = v.patient_id.empty() ? "cohort" : "patient=" + v.patient_id;
    out += " field=" + v.field + " reason=" + v.reason;
    return out;
}

std::vector<Violation> validate_cohort(const Cohort& cohort)
{
    std::vector<Violation> found;
    if (cohort.module_names.empty())
        found.push_back({"", "module_names", "no modules declared"});
    std::set<std::string> names;
    for (const auto& name : cohort.module_names) {
        if (!names.insert(name).second)
            found.push_back({"", "module_names", "duplicate module '" + name + "'"});
    }
    if (cohort.patients.empty()) {
        found.push_back({"", "patients", "empty cohort"});
        return found;
    }

    std::set<std::string> ids;
    for (const auto& p : cohort.patients) {
        const std::string id = p.id.empty() ? "<blank>" : p.id;
        if (p.id.empty())
            found.push_back({id, "patient_id", "blank id"});
        else if (!ids.insert(p.id).second)
            found.push_back({id, "patient_id", "duplicate id"});
        if (!std::isfinite(p.age) || p.age < 0.0)
            found.push_back({id, "age", "must be a finite value >= 0"});
        if (p.nihss < 0 || p.nihss > 42)
            found.push_back({id, "nihss", "outside 0..42"});
        if (p.mrs && (*p.mrs < 0 || *p.mrs > 6))
            found.push_back({id, "mrs", "outside 0..6"});
        if (p.module_probs.size() != cohort.module_names.size()) {
            found.push_back({id, "module_probs",
                             "has " + std::to_string(p.module_probs.size()) + " values for " +
                                 std::to_string(cohort.module_names.size()) + " modules"});
            continue;
        }
        for (std::size_t m = 0; m < p.module_probs.size(); ++m) {
            const double v = p.module_probs[m];
            if (!(v >= 0.0 && v <= 1.0))
                found.push_back({id, "p_" + cohort.module_names[m], "probability outside [0,1]"});
        }
    }
    return found;
}

void require_labeled(const Cohort& cohort)
{
    auto violations = validate_cohort(cohort);
    for (const auto& p : cohort.patients) {
        if (!p.mrs) violations.push_back({p.id, "mrs", "missing (required for evaluation)"});
    }
    if (violations.empty()) return;
    std::string msg = "cohort failed validation:";
    for (const auto& v : violations) msg += "\n" + format_violation(v);
    throw ValidationError(msg);
}

std::vector<Outcome> outcomes(const Cohort& cohort)
{
    std::vector<Outcome> out;
    out.reserve(cohort.patients.size());
    for (const auto& p : cohort.patients) {
        if (!p.mrs) throw ValidationError("patient " + p.id + ": mrs missing");
        out.push_back(binarize_mrs(*p.mrs, p.id));
    }
    return out;
}

Cohort subset(const Cohort& cohort, const std::vector<std::size_t>& indices)
{
    Cohort out;
    out.module_names = cohort.module_names;
    out.patients.reserve(indices.size());
    for (auto i : indices) out.patients.push_back(cohort.patients.at(i));
    return out;
}

Cohort single_module(const Cohort& cohort, std::size_t module_index)
{
    Cohort out;
    out.module_names = {cohort.module_names.at(module_index)};
    out.patients.reserve(cohort.patients.size());
    for (const auto& p : cohort.patients) {
        PatientRecord r = p;
        r.module_probs = {p.module_probs.at(module_index)};
        out.patients.push_back(std::move(r));
    }
    return out;
}

} // namespace strokefusion
