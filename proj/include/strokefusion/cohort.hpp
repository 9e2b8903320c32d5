#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace strokefusion {

/// Binarized 3-month outcome. `good` sorts before `poor`.
enum class Outcome { good = 0, poor = 1 };

std::string_view to_string(Outcome outcome);

/// Covariate used to weight the modules. `none` selects the plain average.
enum class ClinicalVariable { none, age, nihss };

std::string_view to_string(ClinicalVariable variable);
ClinicalVariable parse_clinical_variable(std::string_view name);

struct PatientRecord {
    std::string id;
    double age = 0.0;
    int nihss = 0;
    std::optional<int> mrs;            // absent for inference-only records
    std::vector<double> module_probs;  // ordered like Cohort::module_names
};

std::vector<std::string> default_module_names();

struct Cohort {
    std::vector<std::string> module_names = default_module_names();
    std::vector<PatientRecord> patients;
};

/// good iff mrs <= 2. Throws ValidationError naming `patient_id` when mrs is
/// outside 0..6.
Outcome binarize_mrs(int mrs, std::string_view patient_id = {});

/// Min-max scaling of one clinical covariate onto [0,1], clamped at both ends.
class ClinicalNormalizer {
public:
    ClinicalNormalizer(ClinicalVariable variable, double min, double max);

    double operator()(double value) const;

    ClinicalVariable variable() const { return variable_; }
    double min() const { return min_; }
    double max() const { return max_; }

private:
    ClinicalVariable variable_;
    double min_;
    double max_;
};

double clinical_value(const PatientRecord& record, ClinicalVariable variable);

struct Violation {
    std::string patient_id;  // empty for cohort-level problems
    std::string field;
    std::string reason;
};

std::string format_violation(const Violation& violation);

/// Empty iff every record invariant holds. Never throws.
std::vector<Violation> validate_cohort(const Cohort& cohort);

/// Throws ValidationError listing every violation, plus any record lacking an mRS.
void require_labeled(const Cohort& cohort);

/// Binarized outcome of every patient; requires a labeled cohort.
std::vector<Outcome> outcomes(const Cohort& cohort);

/// Cohort restricted to `indices`, in that order.
Cohort subset(const Cohort& cohort, const std::vector<std::size_t>& indices);

/// Cohort keeping only module `module_index`.
Cohort single_module(const Cohort& cohort, std::size_t module_index);

} // namespace strokefusion
