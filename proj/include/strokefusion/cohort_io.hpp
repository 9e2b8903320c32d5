#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "strokefusion/cohort.hpp"

namespace strokefusion {

// Cohort CSV: header `patient_id,age,nihss,mrs,p_<module>...`, comma separated,
// UTF-8. Module columns are the ones prefixed `p_`; their order is the module
// order. `mrs` may be empty.

/// Throws ValidationError with one line per malformed cell or header problem.
Cohort parse_cohort_csv(std::string_view text);

/// Throws IoError if the file cannot be read.
Cohort read_cohort_csv(const std::filesystem::path& path);

void write_cohort_csv(std::ostream& out, const Cohort& cohort);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(const std::string& field);

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

} // namespace strokefusion
