#include "strokefusion/cohort_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "strokefusion/error.hpp"

namespace strokefusion {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::optional<double> parse_real(std::string_view s)
{
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

std::optional<int> parse_integer(std::string_view s)
{
    auto value = parse_real(s);
    if (!value || std::floor(*value) != *value || std::fabs(*value) > 1e6) return std::nullopt;
    return static_cast<int>(*value);
}

std::string lowercase(std::string s)
{
    for (auto& ch : s) {
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    return s;
}

} // namespace

std::string csv_field(const std::string& field)
{
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                current += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                current += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += ch;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

Cohort parse_cohort_csv(std::string_view text)
{
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<std::string_view> lines;
    while (!text.empty()) {
        auto eol = text.find('\n');
        auto line = trim(text.substr(0, eol));
        if (!line.empty()) lines.push_back(line);
        if (eol == std::string_view::npos) break;
        text.remove_prefix(eol + 1);
    }
    if (lines.empty()) throw ValidationError("cohort csv: missing header");

    const auto header = split_csv_line(lines.front());
    int col_id = -1, col_age = -1, col_nihss = -1, col_mrs = -1;
    std::vector<int> module_cols;
    Cohort cohort;
    cohort.module_names.clear();
    std::vector<std::string> problems;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = lowercase(std::string(trim(header[c])));
        const int ci = static_cast<int>(c);
        if (name == "patient_id") col_id = ci;
        else if (name == "age") col_age = ci;
        else if (name == "nihss") col_nihss = ci;
        else if (name == "mrs") col_mrs = ci;
        else if (name.starts_with("p_") && name.size() > 2) {
            module_cols.push_back(ci);
            cohort.module_names.push_back(name.substr(2));
        } else {
            problems.push_back("header: unknown column '" + name + "'");
        }
    }
    if (col_id < 0) problems.emplace_back("header: missing column 'patient_id'");
    if (col_age < 0) problems.emplace_back("header: missing column 'age'");
    if (col_nihss < 0) problems.emplace_back("header: missing column 'nihss'");
    if (col_mrs < 0) problems.emplace_back("header: missing column 'mrs'");
    if (module_cols.empty()) problems.emplace_back("header: no module columns (p_<module>)");
    if (!problems.empty()) {
        std::string msg = "cohort csv is malformed:";
        for (const auto& p : problems) msg += "\n" + p;
        throw ValidationError(msg);
    }

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto fields = split_csv_line(lines[li]);
        const std::string where = "line " + std::to_string(li + 1);
        if (fields.size() != header.size()) {
            problems.push_back(where + ": expected " + std::to_string(header.size()) +
                               " fields, found " + std::to_string(fields.size()));
            continue;
        }
        PatientRecord r;
        r.id = std::string(trim(fields[col_id]));
        const std::string who = where + " patient=" + r.id;
        if (auto v = parse_real(fields[col_age])) r.age = *v;
        else problems.push_back(who + " field=age reason=not a number");
        if (auto v = parse_integer(fields[col_nihss])) r.nihss = *v;
        else problems.push_back(who + " field=nihss reason=not an integer");
        if (!trim(fields[col_mrs]).empty()) {
            if (auto v = parse_integer(fields[col_mrs])) r.mrs = *v;
            else problems.push_back(who + " field=mrs reason=not an integer");
        }
        for (std::size_t m = 0; m < module_cols.size(); ++m) {
            if (auto v = parse_real(fields[module_cols[m]])) r.module_probs.push_back(*v);
            else {
                problems.push_back(who + " field=p_" + cohort.module_names[m] +
                                   " reason=not a number");
                r.module_probs.push_back(0.0);
            }
        }
        cohort.patients.push_back(std::move(r));
    }
    if (!problems.empty()) {
        std::string msg = "cohort csv is malformed:";
        for (const auto& p : problems) msg += "\n" + p;
        throw ValidationError(msg);
    }
    return cohort;
}

Cohort read_cohort_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open cohort file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("cannot read cohort file " + path.string());
    return parse_cohort_csv(buffer.str());
}

void write_cohort_csv(std::ostream& out, const Cohort& cohort)
{
    out << "patient_id,age,nihss,mrs";
    for (const auto& name : cohort.module_names) out << ",p_" << lowercase(name);
    out << '\n';
    char buf[64];
    for (const auto& p : cohort.patients) {
        out << csv_field(p.id);
        std::snprintf(buf, sizeof buf, ",%.10g,%d,", p.age, p.nihss);
        out << buf;
        if (p.mrs) out << *p.mrs;
        for (double v : p.module_probs) {
            std::snprintf(buf, sizeof buf, ",%.6f", v);
            out << buf;
        }
        out << '\n';
    }
}

} // namespace strokefusion
