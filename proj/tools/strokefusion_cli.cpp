// strokefusion: command-line front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "strokefusion/strokefusion.h"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_invalid = 2;
constexpr int exit_io = 3;

struct CStringDeleter {
    void operator()(char* p) const { sf_string_free(p); }
};
using OwnedString = std::unique_ptr<char, CStringDeleter>;

struct CohortDeleter {
    void operator()(sf_cohort* p) const { sf_cohort_free(p); }
};
struct ConfigDeleter {
    void operator()(sf_config* p) const { sf_config_free(p); }
};

const char* kind_of(sf_status status)
{
    switch (status) {
    case SF_ERROR_VALIDATION: return "validation";
    case SF_ERROR_CONFIG: return "config";
    case SF_ERROR_IO: return "io";
    case SF_ERROR_ARGUMENT: return "argument";
    default: return "internal";
    }
}

int exit_code(sf_status status)
{
    switch (status) {
    case SF_OK: return exit_ok;
    case SF_ERROR_VALIDATION:
    case SF_ERROR_CONFIG:
    case SF_ERROR_ARGUMENT: return exit_invalid;
    case SF_ERROR_IO: return exit_io;
    default: return exit_internal;
    }
}

// One machine-parsable line per diagnostic.
void report_error(const char* kind, const std::string& message)
{
    std::istringstream lines(message);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty()) std::cerr << "strokefusion: error[" << kind << "]: " << line << '\n';
    }
}

int report(sf_status status)
{
    report_error(kind_of(status), sf_last_error());
    return exit_code(status);
}

struct Failure {
    int code;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        report_error("io", "cannot read " + path);
        throw Failure{exit_io};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Temp file + rename so readers never see a partial file.
void write_output(const std::optional<std::string>& path, const std::string& text)
{
    if (!path || *path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    const std::filesystem::path target(*path);
    auto temp = target;
    temp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        out << text;
        out.close();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(temp, ignored);
            report_error("io", "cannot write " + temp.string());
            throw Failure{exit_io};
        }
    }
    std::error_code ec;
    std::filesystem::rename(temp, target, ec);
    if (ec) {
        std::filesystem::remove(temp, ec);
        report_error("io", "cannot move output into place at " + target.string());
        throw Failure{exit_io};
    }
}

void check(sf_status status)
{
    if (status != SF_OK) throw Failure{report(status)};
}

struct SharedFlags {
    std::string config_path;
    std::string cohort;
    std::string variable;
    double norm_min = 0.0;
    double norm_max = 0.0;
    double tau = 0.0;
    double tau_star = 0.0;
    std::string strategy;
    std::size_t k = 0;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    bool unstratified = false;
    std::string out;
    std::string format;

    CLI::Option* o_cohort = nullptr;
    CLI::Option* o_variable = nullptr;
    CLI::Option* o_norm_min = nullptr;
    CLI::Option* o_norm_max = nullptr;
    CLI::Option* o_tau = nullptr;
    CLI::Option* o_tau_star = nullptr;
    CLI::Option* o_strategy = nullptr;
    CLI::Option* o_k = nullptr;
    CLI::Option* o_runs = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_format = nullptr;

    void attach(CLI::App& cmd, bool with_cv_flags)
    {
        cmd.add_option("--config", config_path,
                       "JSON run configuration (default: $STROKEFUSION_CONFIG)");
        o_cohort = cmd.add_option("--cohort", cohort, "cohort CSV");
        o_variable = cmd.add_option("--variable", variable, "clinical weighting variable")
                         ->check(CLI::IsMember({"age", "nihss", "none"}));
        o_norm_min = cmd.add_option("--norm-min", norm_min, "lower normalization bound");
        o_norm_max = cmd.add_option("--norm-max", norm_max, "upper normalization bound");
        o_tau = cmd.add_option("--tau", tau, "preliminary threshold on module probabilities");
        o_tau_star = cmd.add_option("--tau-star", tau_star, "final threshold on the fused probability");
        o_strategy = cmd.add_option("--strategy", strategy, "threshold search criterion")
                         ->check(CLI::IsMember({"youden", "max_accuracy", "fixed"}));
        if (with_cv_flags) {
            o_k = cmd.add_option("--k", k, "number of folds");
            o_runs = cmd.add_option("--runs", runs, "number of seeded runs");
            o_seed = cmd.add_option("--seed", seed, "base seed");
            cmd.add_flag("--unstratified", unstratified, "shuffle folds without class stratification");
        }
        o_out = cmd.add_option("--out", out, "output file (default: standard output)");
        o_format = cmd.add_option("--format", format, "output format")
                       ->check(CLI::IsMember({"csv", "json"}));
    }

    // Config file first, then flags on top.
    std::unique_ptr<sf_config, ConfigDeleter> build() const
    {
        sf_config* raw = nullptr;
        check(sf_config_new(&raw));
        std::unique_ptr<sf_config, ConfigDeleter> config(raw);

        std::string path = config_path;
        if (path.empty()) {
            if (const char* env = std::getenv("STROKEFUSION_CONFIG")) path = env;
        }
        if (!path.empty()) check(sf_config_merge_json(config.get(), read_file(path).c_str()));

        if (o_cohort->count()) check(sf_config_set_cohort_path(config.get(), cohort.c_str()));
        if (o_variable->count()) check(sf_config_set_variable(config.get(), variable.c_str()));
        if (o_norm_min->count() != o_norm_max->count()) {
            report_error("config", "--norm-min and --norm-max must be given together");
            throw Failure{exit_invalid};
        }
        if (o_norm_min->count()) check(sf_config_set_norm_bounds(config.get(), norm_min, norm_max));
        if (o_tau->count()) check(sf_config_set_tau(config.get(), tau));
        if (o_tau_star->count()) check(sf_config_set_tau_star(config.get(), tau_star));
        if (o_strategy->count()) check(sf_config_set_strategy(config.get(), strategy.c_str()));
        if (o_k && o_k->count()) check(sf_config_set_k(config.get(), k));
        if (o_runs && o_runs->count()) check(sf_config_set_runs(config.get(), runs));
        if (o_seed && o_seed->count()) check(sf_config_set_seed(config.get(), seed));
        if (unstratified) check(sf_config_set_stratified(config.get(), 0));
        if (o_out->count()) check(sf_config_set_output(config.get(), out.c_str()));
        if (o_format->count())
            check(sf_config_set_format(config.get(), format == "csv" ? SF_FORMAT_CSV : SF_FORMAT_JSON));
        return config;
    }
};

std::optional<std::string> output_path(const sf_config* config)
{
    const char* p = sf_config_output(config);
    return p ? std::optional<std::string>(p) : std::nullopt;
}

std::unique_ptr<sf_cohort, CohortDeleter> load_cohort(const sf_config* config)
{
    const char* path = sf_config_cohort_path(config);
    if (!path) {
        report_error("config", "no cohort given (--cohort or \"cohort\" in the config file)");
        throw Failure{exit_invalid};
    }
    sf_cohort* raw = nullptr;
    check(sf_cohort_load_csv(path, &raw));
    return std::unique_ptr<sf_cohort, CohortDeleter>(raw);
}

int cmd_validate(const SharedFlags& flags)
{
    auto config = flags.build();
    auto cohort = load_cohort(config.get());
    char* text = nullptr;
    std::size_t n = 0;
    check(sf_cohort_validate(cohort.get(), &text, &n));
    OwnedString owned(text);
    write_output(output_path(config.get()), owned.get());
    if (n > 0) {
        report_error("validation", std::to_string(n) + " violation(s) found");
        return exit_invalid;
    }
    return exit_ok;
}

int cmd_fuse(const SharedFlags& flags)
{
    auto config = flags.build();
    auto cohort = load_cohort(config.get());
    char* text = nullptr;
    check(sf_fuse_cohort(cohort.get(), config.get(), sf_config_format(config.get(), SF_FORMAT_CSV), &text));
    OwnedString owned(text);
    write_output(output_path(config.get()), owned.get());
    return exit_ok;
}

int cmd_cv(const SharedFlags& flags)
{
    auto config = flags.build();
    auto cohort = load_cohort(config.get());
    char* json = nullptr;
    char* csv = nullptr;
    char* text = nullptr;
    check(sf_cv_run(cohort.get(), config.get(), &json, &csv, &text));
    OwnedString owned_json(json), owned_csv(csv), owned_text(text);

    const auto out = output_path(config.get());
    const bool as_csv = sf_config_format(config.get(), SF_FORMAT_JSON) == SF_FORMAT_CSV;
    write_output(out, as_csv ? owned_csv.get() : owned_json.get());
    (out && *out != "-" ? std::cout : std::cerr) << owned_text.get();
    return exit_ok;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& measure,
                const std::string& model_a, const std::string& model_b, const std::string& out)
{
    const auto text_a = read_file(a);
    const auto text_b = read_file(b);
    char* result = nullptr;
    check(sf_compare_summaries(text_a.c_str(), text_b.c_str(), measure.c_str(),
                               model_a.empty() ? nullptr : model_a.c_str(),
                               model_b.empty() ? nullptr : model_b.c_str(), &result));
    OwnedString owned(result);
    write_output(out.empty() ? std::nullopt : std::optional<std::string>(out), owned.get());
    return exit_ok;
}

int cmd_synth(const std::string& spec_path, const std::optional<std::uint64_t>& seed,
              const std::string& out)
{
    const std::string spec = spec_path.empty() ? std::string("{}") : read_file(spec_path);
    char* csv = nullptr;
    check(sf_synth_csv(spec.c_str(), seed ? &*seed : nullptr, &csv));
    OwnedString owned(csv);
    write_output(out.empty() ? std::nullopt : std::optional<std::string>(out), owned.get());
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Clinical-covariate weighted late fusion of per-modality outcome classifiers"};
    app.set_version_flag("--version", std::string(sf_version()));
    app.require_subcommand(1);

    SharedFlags validate_flags, fuse_flags, cv_flags;
    auto* validate = app.add_subcommand("validate", "check a cohort CSV against the record invariants");
    validate_flags.attach(*validate, false);
    auto* fuse = app.add_subcommand("fuse", "per-patient weights, fused probability and labels");
    fuse_flags.attach(*fuse, false);
    auto* cv = app.add_subcommand("cv", "repeated k-fold evaluation of every module and both ensembles");
    cv_flags.attach(*cv, true);

    auto* compare = app.add_subcommand("compare", "Wilcoxon signed-rank test between two cv summaries");
    std::string cmp_a, cmp_b, cmp_measure = "auc", cmp_model_a, cmp_model_b, cmp_out;
    compare->add_option("--a", cmp_a, "first summary JSON")->required();
    compare->add_option("--b", cmp_b, "second summary JSON")->required();
    compare->add_option("--measure", cmp_measure, "accuracy|sensitivity|specificity|f1|mae|auc");
    compare->add_option("--model-a", cmp_model_a, "model inside the first report");
    compare->add_option("--model-b", cmp_model_b, "model inside the second report");
    compare->add_option("--out", cmp_out, "output file (default: standard output)");

    auto* synth = app.add_subcommand("synth", "generate a synthetic cohort CSV");
    std::string synth_spec, synth_out;
    std::uint64_t synth_seed = 0;
    synth->add_option("--spec", synth_spec, "JSON generator spec (default: built-in defaults)");
    auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "override the spec seed");
    synth->add_option("--out", synth_out, "output file (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what());
        return exit_invalid;
    }

    try {
        if (*validate) return cmd_validate(validate_flags);
        if (*fuse) return cmd_fuse(fuse_flags);
        if (*cv) return cmd_cv(cv_flags);
        if (*compare) return cmd_compare(cmp_a, cmp_b, cmp_measure, cmp_model_a, cmp_model_b, cmp_out);
        if (*synth) {
            std::optional<std::uint64_t> seed;
            if (synth_seed_opt->count()) seed = synth_seed;
            return cmd_synth(synth_spec, seed, synth_out);
        }
    } catch (const Failure& f) {
        return f.code;
    }
    return exit_internal;
}
