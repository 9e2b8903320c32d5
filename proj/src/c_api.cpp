#include "strokefusion/strokefusion.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "strokefusion/cohort_io.hpp"
#include "strokefusion/error.hpp"
#include "strokefusion/fuse_table.hpp"
#include "strokefusion/harness.hpp"
#include "strokefusion/json_io.hpp"
#include "strokefusion/metrics.hpp"
#include "strokefusion/synth.hpp"
#include "strokefusion/wilcoxon.hpp"

namespace sf = strokefusion;

struct sf_cohort {
    sf::Cohort cohort;
};

struct sf_config {
    sf::RunConfig run;
};

namespace {

thread_local std::string last_error;

sf_status fail(sf_status status, std::string message)
{
    last_error = std::move(message);
    return status;
}

template <class F>
sf_status guarded(F&& body)
{
    try {
        last_error.clear();
        return body();
    } catch (const sf::ValidationError& e) {
        return fail(SF_ERROR_VALIDATION, e.what());
    } catch (const sf::ConfigError& e) {
        return fail(SF_ERROR_CONFIG, e.what());
    } catch (const sf::IoError& e) {
        return fail(SF_ERROR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SF_ERROR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SF_ERROR_INTERNAL, e.what());
    } catch (...) {
        return fail(SF_ERROR_INTERNAL, "unknown error");
    }
}

char* duplicate(const std::string& text)
{
    auto* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

// Hands several strings out at once: all or none.
class OwnedOutputs {
public:
    void add(char** slot, const std::string& text)
    {
        pending_.push_back({slot, duplicate(text)});
    }
    void release()
    {
        for (auto& [slot, text] : pending_) *slot = std::exchange(text, nullptr);
    }
    ~OwnedOutputs()
    {
        for (auto& entry : pending_) std::free(entry.second);
    }

private:
    std::vector<std::pair<char**, char*>> pending_;
};

sf_status null_argument(const char* name)
{
    return fail(SF_ERROR_ARGUMENT, std::string("null argument: ") + name);
}

std::optional<sf::Outcome> to_outcome(sf_outcome value)
{
    if (value == SF_OUTCOME_GOOD) return sf::Outcome::good;
    if (value == SF_OUTCOME_POOR) return sf::Outcome::poor;
    return std::nullopt;
}

} // namespace

extern "C" {

const char* sf_version(void)
{
    return "0.1.0";
}

const char* sf_last_error(void)
{
    return last_error.c_str();
}

void sf_string_free(char* text)
{
    std::free(text);
}

sf_status sf_cohort_load_csv(const char* path, sf_cohort** out)
{
    if (!path) return null_argument("path");
    if (!out) return null_argument("out");
    return guarded([&] {
        *out = new sf_cohort{sf::read_cohort_csv(path)};
        return SF_OK;
    });
}

sf_status sf_cohort_parse_csv(const char* text, sf_cohort** out)
{
    if (!text) return null_argument("text");
    if (!out) return null_argument("out");
    return guarded([&] {
        *out = new sf_cohort{sf::parse_cohort_csv(text)};
        return SF_OK;
    });
}

void sf_cohort_free(sf_cohort* cohort)
{
    delete cohort;
}

size_t sf_cohort_patient_count(const sf_cohort* cohort)
{
    return cohort ? cohort->cohort.patients.size() : 0;
}

size_t sf_cohort_module_count(const sf_cohort* cohort)
{
    return cohort ? cohort->cohort.module_names.size() : 0;
}

const char* sf_cohort_module_name(const sf_cohort* cohort, size_t index)
{
    if (!cohort || index >= cohort->cohort.module_names.size()) return nullptr;
    return cohort->cohort.module_names[index].c_str();
}

sf_status sf_cohort_validate(const sf_cohort* cohort, char** report, size_t* n_violations)
{
    if (!cohort) return null_argument("cohort");
    if (!report) return null_argument("report");
    return guarded([&] {
        const auto violations = sf::validate_cohort(cohort->cohort);
        std::string text = "patient_id,field,reason\n";
        for (const auto& v : violations)
            text += sf::csv_field(v.patient_id) + "," + sf::csv_field(v.field) + "," +
                    sf::csv_field(v.reason) + "\n";
        *report = duplicate(text);
        if (n_violations) *n_violations = violations.size();
        return SF_OK;
    });
}

sf_status sf_config_new(sf_config** out)
{
    if (!out) return null_argument("out");
    return guarded([&] {
        *out = new sf_config{};
        return SF_OK;
    });
}

void sf_config_free(sf_config* config)
{
    delete config;
}

sf_status sf_config_merge_json(sf_config* config, const char* json_text)
{
    if (!config) return null_argument("config");
    if (!json_text) return null_argument("json_text");
    return guarded([&] {
        auto merged = config->run;
        sf::merge_run_config(merged, sf::parse_json(json_text, "run config"));
        config->run = std::move(merged);
        return SF_OK;
    });
}

sf_status sf_config_set_variable(sf_config* config, const char* variable)
{
    if (!config) return null_argument("config");
    if (!variable) return null_argument("variable");
    return guarded([&] {
        config->run.fusion.variable = sf::parse_clinical_variable(variable);
        return SF_OK;
    });
}

sf_status sf_config_set_norm_bounds(sf_config* config, double min, double max)
{
    if (!config) return null_argument("config");
    return guarded([&] {
        sf::ClinicalNormalizer(sf::ClinicalVariable::nihss, min, max);  // validates min < max
        config->run.fusion.norm_min = min;
        config->run.fusion.norm_max = max;
        return SF_OK;
    });
}

sf_status sf_config_set_tau(sf_config* config, double tau)
{
    if (!config) return null_argument("config");
    if (!(tau > 0.0 && tau < 1.0)) return fail(SF_ERROR_CONFIG, "tau must lie in (0,1)");
    config->run.fusion.tau = tau;
    return SF_OK;
}

sf_status sf_config_set_tau_star(sf_config* config, double tau_star)
{
    if (!config) return null_argument("config");
    if (!(tau_star > 0.0 && tau_star < 1.0))
        return fail(SF_ERROR_CONFIG, "tau_star must lie in (0,1)");
    config->run.fusion.tau_star = tau_star;
    return SF_OK;
}

sf_status sf_config_set_strategy(sf_config* config, const char* strategy)
{
    if (!config) return null_argument("config");
    if (!strategy) return null_argument("strategy");
    return guarded([&] {
        config->run.fusion.strategy = sf::parse_threshold_strategy(strategy);
        return SF_OK;
    });
}

sf_status sf_config_set_k(sf_config* config, size_t k)
{
    if (!config) return null_argument("config");
    if (k < 2) return fail(SF_ERROR_CONFIG, "k must be at least 2");
    config->run.plan.k = k;
    return SF_OK;
}

sf_status sf_config_set_runs(sf_config* config, size_t runs)
{
    if (!config) return null_argument("config");
    if (runs < 1) return fail(SF_ERROR_CONFIG, "runs must be at least 1");
    config->run.plan.n_runs = runs;
    return SF_OK;
}

sf_status sf_config_set_seed(sf_config* config, uint64_t seed)
{
    if (!config) return null_argument("config");
    config->run.plan.base_seed = seed;
    return SF_OK;
}

sf_status sf_config_set_stratified(sf_config* config, int stratified)
{
    if (!config) return null_argument("config");
    config->run.plan.stratified = stratified != 0;
    return SF_OK;
}

sf_status sf_config_set_cohort_path(sf_config* config, const char* path)
{
    if (!config) return null_argument("config");
    if (!path) return null_argument("path");
    return guarded([&] {
        config->run.cohort = path;
        return SF_OK;
    });
}

sf_status sf_config_set_output(sf_config* config, const char* path)
{
    if (!config) return null_argument("config");
    if (!path) return null_argument("path");
    return guarded([&] {
        config->run.out = path;
        return SF_OK;
    });
}

sf_status sf_config_set_format(sf_config* config, sf_format format)
{
    if (!config) return null_argument("config");
    if (format != SF_FORMAT_CSV && format != SF_FORMAT_JSON)
        return fail(SF_ERROR_ARGUMENT, "unknown format");
    config->run.format = format == SF_FORMAT_CSV ? "csv" : "json";
    return SF_OK;
}

const char* sf_config_cohort_path(const sf_config* config)
{
    return config && config->run.cohort ? config->run.cohort->c_str() : nullptr;
}

const char* sf_config_output(const sf_config* config)
{
    return config && config->run.out ? config->run.out->c_str() : nullptr;
}

sf_format sf_config_format(const sf_config* config, sf_format fallback)
{
    if (!config || !config->run.format) return fallback;
    return *config->run.format == "csv" ? SF_FORMAT_CSV : SF_FORMAT_JSON;
}

sf_status sf_config_to_json(const sf_config* config, char** json_text)
{
    if (!config) return null_argument("config");
    if (!json_text) return null_argument("json_text");
    return guarded([&] {
        *json_text = duplicate(sf::to_json(config->run).dump(2) + "\n");
        return SF_OK;
    });
}

sf_status sf_fuse_cohort(const sf_cohort* cohort, const sf_config* config, sf_format format,
                         char** output)
{
    if (!cohort) return null_argument("cohort");
    if (!config) return null_argument("config");
    if (!output) return null_argument("output");
    return guarded([&] {
        const auto table = sf::fuse_table(cohort->cohort, config->run.fusion);
        *output = duplicate(format == SF_FORMAT_JSON ? sf::render_fuse_json(table)
                                                     : sf::render_fuse_csv(table));
        return SF_OK;
    });
}

sf_status sf_cv_run(const sf_cohort* cohort, const sf_config* config, char** summary_json,
                    char** table_csv, char** table_text)
{
    if (!cohort) return null_argument("cohort");
    if (!config) return null_argument("config");
    return guarded([&] {
        const auto report = sf::run_cv(cohort->cohort, config->run.plan, config->run.fusion);
        OwnedOutputs outputs;
        if (summary_json) outputs.add(summary_json, sf::to_json(report).dump(2) + "\n");
        if (table_csv) outputs.add(table_csv, sf::render_table(report, true));
        if (table_text) outputs.add(table_text, sf::render_table(report, false));
        outputs.release();
        return SF_OK;
    });
}

sf_status sf_compare_summaries(const char* summary_a_json, const char* summary_b_json,
                               const char* measure, const char* model_a, const char* model_b,
                               char** result_json)
{
    if (!summary_a_json) return null_argument("summary_a_json");
    if (!summary_b_json) return null_argument("summary_b_json");
    if (!measure) return null_argument("measure");
    if (!result_json) return null_argument("result_json");
    return guarded([&] {
        const auto which = sf::parse_measure(measure);
        const auto a = sf::select_summary(sf::parse_json(summary_a_json, "summary a"),
                                          model_a ? model_a : "");
        const auto b = sf::select_summary(sf::parse_json(summary_b_json, "summary b"),
                                          model_b ? model_b : "");
        auto doc = sf::to_json(sf::compare_models(a, b, which));
        doc["measure"] = measure;
        doc["model_a"] = a.model;
        doc["model_b"] = b.model;
        *result_json = duplicate(doc.dump(2) + "\n");
        return SF_OK;
    });
}

sf_status sf_synth_csv(const char* spec_json, const uint64_t* seed_override, char** cohort_csv)
{
    if (!spec_json) return null_argument("spec_json");
    if (!cohort_csv) return null_argument("cohort_csv");
    return guarded([&] {
        auto spec = sf::synthetic_spec_from_json(sf::parse_json(spec_json, "synthetic spec"));
        if (seed_override) spec.seed = *seed_override;
        std::ostringstream out;
        sf::write_cohort_csv(out, sf::generate(spec));
        *cohort_csv = duplicate(out.str());
        return SF_OK;
    });
}

sf_status sf_fuse_probabilities(const double* probs, size_t n, double c, double tau,
                                double tau_star, double* out_weights, double* out_fused,
                                sf_outcome* out_label)
{
    if (!probs) return null_argument("probs");
    if (n == 0) return fail(SF_ERROR_ARGUMENT, "no probabilities");
    return guarded([&] {
        const std::span<const double> p(probs, n);
        for (double v : p) {
            if (!(v >= 0.0 && v <= 1.0)) throw sf::ValidationError("probability outside [0,1]");
        }
        const auto weights = sf::compute_weights(sf::derive_labels(p, tau), c);
        const double fused = sf::fuse(p, weights);
        if (out_weights) std::copy(weights.begin(), weights.end(), out_weights);
        if (out_fused) *out_fused = fused;
        if (out_label)
            *out_label = sf::classify(fused, tau_star) == sf::Outcome::poor ? SF_OUTCOME_POOR
                                                                            : SF_OUTCOME_GOOD;
        return SF_OK;
    });
}

sf_status sf_auc(const double* scores, const sf_outcome* truth, size_t n, double* out)
{
    if (!scores) return null_argument("scores");
    if (!truth) return null_argument("truth");
    if (!out) return null_argument("out");
    return guarded([&] {
        std::vector<sf::Outcome> labels;
        for (size_t i = 0; i < n; ++i) {
            auto o = to_outcome(truth[i]);
            if (!o) return fail(SF_ERROR_ARGUMENT, "truth value is neither good nor poor");
            labels.push_back(*o);
        }
        *out = sf::auc(std::span<const double>(scores, n), labels);
        return SF_OK;
    });
}

sf_status sf_wilcoxon(const double* a, const double* b, size_t n, sf_test_result* out)
{
    if (!a) return null_argument("a");
    if (!b) return null_argument("b");
    if (!out) return null_argument("out");
    return guarded([&] {
        const auto r = sf::wilcoxon_signed_rank({{a, a + n}, {b, b + n}});
        out->statistic = r.statistic;
        out->p_value = r.p_value;
        out->n_effective = r.n_effective;
        out->exact = r.method == sf::TestMethod::exact ? 1 : 0;
        return SF_OK;
    });
}

} // extern "C"
