#include "strokefusion/json_io.hpp"

#include <set>

#include "strokefusion/error.hpp"

namespace strokefusion {

namespace {

void reject_unknown(const Json& doc, const std::set<std::string>& known, const std::string& what)
{
    if (!doc.is_object()) throw ConfigError(what + " must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) throw ConfigError(what + ": unknown key '" + key + "'");
    }
}

template <class T>
T get_as(const Json& doc, const std::string& key, const std::string& what)
{
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(what + ": key '" + key + "' has the wrong type");
    }
}

std::size_t get_count(const Json& doc, const std::string& key, const std::string& what)
{
    const auto& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(what + ": key '" + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

Json optional_number(const std::optional<double>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

std::optional<double> read_optional(const Json& doc, const std::string& key, const std::string& what)
{
    if (doc.at(key).is_null()) return std::nullopt;
    return get_as<double>(doc, key, what);
}

} // namespace

Json parse_json(const std::string& text, const std::string& what)
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(what + " is not valid JSON: " + e.what());
    }
}

void merge_run_config(RunConfig& config, const Json& doc)
{
    const std::string what = "run config";
    reject_unknown(doc, {"cohort", "out", "format", "variable", "norm_min", "norm_max", "tau",
                         "tau_star", "strategy", "k", "runs", "seed", "stratified"},
                   what);
    if (doc.contains("cohort")) config.cohort = get_as<std::string>(doc, "cohort", what);
    if (doc.contains("out")) config.out = get_as<std::string>(doc, "out", what);
    if (doc.contains("format")) {
        auto f = get_as<std::string>(doc, "format", what);
        if (f != "csv" && f != "json") throw ConfigError("format must be csv or json");
        config.format = f;
    }
    auto& fusion = config.fusion;
    if (doc.contains("variable"))
        fusion.variable = parse_clinical_variable(get_as<std::string>(doc, "variable", what));
    if (doc.contains("norm_min")) fusion.norm_min = read_optional(doc, "norm_min", what);
    if (doc.contains("norm_max")) fusion.norm_max = read_optional(doc, "norm_max", what);
    if (doc.contains("tau")) fusion.tau = read_optional(doc, "tau", what);
    if (doc.contains("tau_star")) fusion.tau_star = read_optional(doc, "tau_star", what);
    if (doc.contains("strategy"))
        fusion.strategy = parse_threshold_strategy(get_as<std::string>(doc, "strategy", what));
    if (doc.contains("k")) config.plan.k = get_count(doc, "k", what);
    if (doc.contains("runs")) config.plan.n_runs = get_count(doc, "runs", what);
    if (doc.contains("seed")) {
        const auto& v = doc.at("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw ConfigError(what + ": seed must be a non-negative integer");
        config.plan.base_seed = v.get<std::uint64_t>();
    }
    if (doc.contains("stratified")) config.plan.stratified = get_as<bool>(doc, "stratified", what);
}

Json to_json(const RunConfig& config)
{
    Json doc;
    if (config.cohort) doc["cohort"] = *config.cohort;
    if (config.out) doc["out"] = *config.out;
    if (config.format) doc["format"] = *config.format;
    doc.update(to_json(config.fusion));
    doc.update(to_json(config.plan));
    return doc;
}

Json to_json(const FusionConfig& config)
{
    Json doc;
    doc["variable"] = std::string(to_string(config.variable));
    doc["norm_min"] = optional_number(config.norm_min);
    doc["norm_max"] = optional_number(config.norm_max);
    doc["tau"] = optional_number(config.tau);
    doc["tau_star"] = optional_number(config.tau_star);
    doc["strategy"] = std::string(to_string(config.strategy));
    return doc;
}

Json to_json(const CvPlan& plan)
{
    Json doc;
    doc["k"] = plan.k;
    doc["runs"] = plan.n_runs;
    doc["seed"] = plan.base_seed;
    doc["stratified"] = plan.stratified;
    return doc;
}

Json to_json(const MetricReport& report)
{
    Json doc;
    for (auto m : all_measures) doc[std::string(to_string(m))] = report.get(m);
    doc["n_patients"] = report.n_patients;
    doc["positive_class"] = std::string(to_string(report.positive_class));
    doc["degenerate"] = report.degenerate;
    return doc;
}

Json to_json(const RunSummary& summary)
{
    Json doc;
    doc["model"] = summary.model;
    doc["config"] = to_json(summary.config);
    doc["plan"] = to_json(summary.plan);
    doc["n_runs"] = summary.runs.size();
    doc["n_ok"] = summary.n_ok;
    doc["positive_class"] = "poor";
    if (summary.n_ok > 0) {
        Json measures;
        for (auto m : all_measures) {
            measures[std::string(to_string(m))] = {{"mean", summary.stat(m).mean},
                                                   {"std", summary.stat(m).std}};
        }
        doc["measures"] = measures;
    } else {
        doc["measures"] = nullptr;
    }
    doc["seed_schedule"] = summary.seed_schedule();
    Json runs = Json::array();
    for (const auto& r : summary.runs) {
        Json run;
        run["run"] = r.run_index;
        run["seed"] = r.seed;
        run["status"] = r.ok ? "ok" : "failed";
        if (r.ok) run["metrics"] = to_json(r.metrics);
        else run["error"] = r.error;
        Json folds = Json::array();
        for (const auto& f : r.folds) {
            folds.push_back({{"fold", f.fold},
                             {"n_train", f.n_train},
                             {"n_test", f.n_test},
                             {"tau", optional_number(f.tau)},
                             {"tau_star", f.tau_star},
                             {"norm_min", optional_number(f.norm_min)},
                             {"norm_max", optional_number(f.norm_max)}});
        }
        run["thresholds"] = folds;
        runs.push_back(run);
    }
    doc["runs"] = runs;
    return doc;
}

Json to_json(const CvReport& report)
{
    Json doc;
    doc["schema"] = "strokefusion.cv/1";
    doc["config"] = to_json(report.config);
    doc["plan"] = to_json(report.plan);
    Json models = Json::array();
    for (const auto& m : report.models) models.push_back(to_json(m));
    doc["models"] = models;
    return doc;
}

Json to_json(const TestResult& result)
{
    Json doc;
    doc["test"] = "wilcoxon_signed_rank";
    doc["statistic"] = result.statistic;
    doc["p_value"] = result.p_value;
    doc["n_effective"] = result.n_effective;
    doc["method"] = std::string(to_string(result.method));
    doc["all_zero"] = result.all_zero;
    return doc;
}

RunSummary summary_from_json(const Json& doc)
{
    try {
        RunSummary summary;
        summary.model = doc.at("model").get<std::string>();
        for (const auto& run : doc.at("runs")) {
            RunRecord r;
            r.run_index = run.at("run").get<std::size_t>();
            r.seed = run.at("seed").get<std::uint64_t>();
            r.ok = run.at("status").get<std::string>() == "ok";
            if (r.ok) {
                const auto& m = run.at("metrics");
                r.metrics.accuracy = m.at("accuracy").get<double>();
                r.metrics.sensitivity = m.at("sensitivity").get<double>();
                r.metrics.specificity = m.at("specificity").get<double>();
                r.metrics.f1 = m.at("f1").get<double>();
                r.metrics.mae = m.at("mae").get<double>();
                r.metrics.auc = m.at("auc").get<double>();
                r.metrics.n_patients = m.at("n_patients").get<std::size_t>();
                r.metrics.degenerate = m.at("degenerate").get<bool>();
            } else if (run.contains("error")) {
                r.error = run.at("error").get<std::string>();
            }
            summary.runs.push_back(std::move(r));
        }
        summary.plan.n_runs = summary.runs.size();
        summary.n_ok = 0;
        for (const auto& r : summary.runs) summary.n_ok += r.ok;
        return summary;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed run summary: ") + e.what());
    }
}

RunSummary select_summary(const Json& doc, const std::string& model)
{
    if (!doc.is_object()) throw ValidationError("summary document must be a JSON object");
    if (!doc.contains("models")) {
        auto summary = summary_from_json(doc);
        if (!model.empty() && summary.model != model)
            throw ConfigError("summary holds model '" + summary.model + "', not '" + model + "'");
        return summary;
    }
    const auto& models = doc.at("models");
    std::vector<std::string> names;
    for (const auto& m : models) names.push_back(m.value("model", ""));
    std::string wanted = model;
    if (wanted.empty()) {
        for (const auto& n : names) {
            if (n.starts_with("ensemble_w_")) wanted = n;
        }
        if (wanted.empty() && names.size() == 1) wanted = names.front();
        if (wanted.empty()) throw ConfigError("report holds several models; choose one explicitly");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == wanted) return summary_from_json(models[i]);
    }
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("no model '" + wanted + "' in report (have: " + known + ")");
}

SyntheticSpec synthetic_spec_from_json(const Json& doc)
{
    const std::string what = "synthetic spec";
    reject_unknown(doc, {"n_patients", "prevalence_poor", "module_names", "target_auc",
                         "covariate_correlation", "seed"},
                   what);
    SyntheticSpec spec;
    if (doc.contains("n_patients")) spec.n_patients = get_count(doc, "n_patients", what);
    if (doc.contains("prevalence_poor"))
        spec.prevalence_poor = get_as<double>(doc, "prevalence_poor", what);
    if (doc.contains("module_names"))
        spec.module_names = get_as<std::vector<std::string>>(doc, "module_names", what);
    if (doc.contains("target_auc"))
        spec.target_auc = get_as<std::vector<double>>(doc, "target_auc", what);
    if (doc.contains("covariate_correlation")) {
        const auto& rho = doc.at("covariate_correlation");
        reject_unknown(rho, {"age", "nihss"}, what + " covariate_correlation");
        if (rho.contains("age")) spec.rho_age = get_as<double>(rho, "age", what);
        if (rho.contains("nihss")) spec.rho_nihss = get_as<double>(rho, "nihss", what);
    }
    if (doc.contains("seed")) {
        const auto& v = doc.at("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw ConfigError(what + ": seed must be a non-negative integer");
        spec.seed = v.get<std::uint64_t>();
    }
    spec.check();
    return spec;
}

Json to_json(const SyntheticSpec& spec)
{
    Json doc;
    doc["n_patients"] = spec.n_patients;
    doc["prevalence_poor"] = spec.prevalence_poor;
    doc["module_names"] = spec.module_names;
    doc["target_auc"] = spec.target_auc;
    doc["covariate_correlation"] = {{"age", spec.rho_age}, {"nihss", spec.rho_nihss}};
    doc["seed"] = spec.seed;
    return doc;
}

} // namespace strokefusion
