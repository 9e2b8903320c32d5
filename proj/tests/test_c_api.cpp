#include <gtest/gtest.h>

#include <json.hpp>
#include <memory>
#include <string>

#include "strokefusion/strokefusion.h"

namespace {

struct StringDeleter {
    void operator()(char* s) const { sf_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct CohortDeleter {
    void operator()(sf_cohort* c) const { sf_cohort_free(c); }
};
struct ConfigDeleter {
    void operator()(sf_config* c) const { sf_config_free(c); }
};
using CohortHandle = std::unique_ptr<sf_cohort, CohortDeleter>;
using ConfigHandle = std::unique_ptr<sf_config, ConfigDeleter>;

const std::string fixture_dir = STROKEFUSION_FIXTURES;

CohortHandle load(const std::string& name)
{
    sf_cohort* raw = nullptr;
    EXPECT_EQ(sf_cohort_load_csv((fixture_dir + "/" + name).c_str(), &raw), SF_OK) << sf_last_error();
    return CohortHandle(raw);
}

ConfigHandle config()
{
    sf_config* raw = nullptr;
    EXPECT_EQ(sf_config_new(&raw), SF_OK);
    return ConfigHandle(raw);
}

} // namespace

TEST(CApi, Version)
{
    EXPECT_STREQ(sf_version(), "0.1.0");
}

TEST(CApi, LoadAndInspect)
{
    const auto cohort = load("weights_nihss.csv");
    EXPECT_EQ(sf_cohort_patient_count(cohort.get()), 5u);
    ASSERT_EQ(sf_cohort_module_count(cohort.get()), 5u);
    EXPECT_STREQ(sf_cohort_module_name(cohort.get(), 4), "tmax");
    EXPECT_EQ(sf_cohort_module_name(cohort.get(), 5), nullptr);

    char* report = nullptr;
    std::size_t n = 99;
    ASSERT_EQ(sf_cohort_validate(cohort.get(), &report, &n), SF_OK);
    OwnedString owned(report);
    EXPECT_EQ(n, 0u);
}

TEST(CApi, ValidateReportsViolations)
{
    sf_cohort* raw = nullptr;
    ASSERT_EQ(sf_cohort_parse_csv("patient_id,age,nihss,mrs,p_adc\nA,50,4,1,1.3\n", &raw), SF_OK);
    CohortHandle cohort(raw);
    char* report = nullptr;
    std::size_t n = 0;
    ASSERT_EQ(sf_cohort_validate(cohort.get(), &report, &n), SF_OK);
    OwnedString owned(report);
    EXPECT_EQ(n, 1u);
    EXPECT_NE(std::string(report).find("A,p_adc,"), std::string::npos);
}

TEST(CApi, ErrorStatuses)
{
    sf_cohort* raw = nullptr;
    EXPECT_EQ(sf_cohort_load_csv(nullptr, &raw), SF_ERROR_ARGUMENT);
    EXPECT_EQ(sf_cohort_load_csv("/nonexistent/cohort.csv", &raw), SF_ERROR_IO);
    EXPECT_EQ(raw, nullptr);
    EXPECT_NE(std::string(sf_last_error()).size(), 0u);
    EXPECT_EQ(sf_cohort_parse_csv("patient_id,age\n", &raw), SF_ERROR_VALIDATION);

    const auto cfg = config();
    EXPECT_EQ(sf_config_set_tau(cfg.get(), 1.5), SF_ERROR_CONFIG);
    EXPECT_EQ(sf_config_set_variable(cfg.get(), "weight"), SF_ERROR_CONFIG);
    EXPECT_EQ(sf_config_set_k(cfg.get(), 1), SF_ERROR_CONFIG);
    EXPECT_EQ(sf_config_merge_json(cfg.get(), "{\"tua\": 0.4}"), SF_ERROR_CONFIG);
    EXPECT_EQ(sf_config_merge_json(cfg.get(), "{not json"), SF_ERROR_CONFIG);
    EXPECT_EQ(sf_config_set_k(nullptr, 5), SF_ERROR_ARGUMENT);
}

TEST(CApi, ConfigMergeIsAtomic)
{
    const auto cfg = config();
    ASSERT_EQ(sf_config_merge_json(cfg.get(), "{\"tau\": 0.4, \"k\": 3, \"cohort\": \"x.csv\"}"), SF_OK);
    EXPECT_EQ(sf_config_merge_json(cfg.get(), "{\"tau\": 0.3, \"k\": \"three\"}"), SF_ERROR_CONFIG);
    char* text = nullptr;
    ASSERT_EQ(sf_config_to_json(cfg.get(), &text), SF_OK);
    OwnedString owned(text);
    const auto doc = nlohmann::json::parse(text);
    EXPECT_EQ(doc["tau"], 0.4);
    EXPECT_EQ(doc["k"], 3);
    EXPECT_STREQ(sf_config_cohort_path(cfg.get()), "x.csv");
    EXPECT_EQ(sf_config_format(cfg.get(), SF_FORMAT_JSON), SF_FORMAT_JSON);
}

TEST(CApi, FuseProbabilitiesPatient023)
{
    const double probs[] = {0.68, 0.75, 0.74, 0.07, 0.24};
    double weights[5];
    double fused = 0;
    sf_outcome label = SF_OUTCOME_POOR;
    ASSERT_EQ(sf_fuse_probabilities(probs, 5, 8.0 / 26, 0.40, 0.40, weights, &fused, &label), SF_OK);
    const double printed[] = {0.13, 0.13, 0.13, 0.3, 0.3};
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(weights[i], printed[i], 0.01);
    EXPECT_NEAR(fused, 0.3823, 1e-4);
    EXPECT_EQ(label, SF_OUTCOME_GOOD);

    EXPECT_EQ(sf_fuse_probabilities(probs, 0, 0.5, 0.4, 0.4, weights, &fused, &label), SF_ERROR_ARGUMENT);
    const double out_of_range[] = {0.2, 1.5};
    EXPECT_EQ(sf_fuse_probabilities(out_of_range, 2, 0.5, 0.4, 0.4, weights, &fused, &label),
              SF_ERROR_VALIDATION);
    EXPECT_EQ(sf_fuse_probabilities(nullptr, 5, 0.5, 0.4, 0.4, weights, &fused, &label), SF_ERROR_ARGUMENT);
}

TEST(CApi, AucAndWilcoxon)
{
    const double scores[] = {0.1, 0.4, 0.35, 0.8};
    const sf_outcome truth[] = {SF_OUTCOME_GOOD, SF_OUTCOME_GOOD, SF_OUTCOME_POOR, SF_OUTCOME_POOR};
    double value = 0;
    ASSERT_EQ(sf_auc(scores, truth, 4, &value), SF_OK);
    EXPECT_DOUBLE_EQ(value, 0.75);
    const sf_outcome single[] = {SF_OUTCOME_GOOD, SF_OUTCOME_GOOD, SF_OUTCOME_GOOD, SF_OUTCOME_GOOD};
    EXPECT_EQ(sf_auc(scores, single, 4, &value), SF_ERROR_VALIDATION);

    double a[10], b[10];
    for (int i = 0; i < 10; ++i) {
        a[i] = 0.8 + 0.01 * i;
        b[i] = 0.7;
    }
    sf_test_result r{};
    ASSERT_EQ(sf_wilcoxon(a, b, 10, &r), SF_OK);
    EXPECT_DOUBLE_EQ(r.p_value, 2.0 / 1024);
    EXPECT_EQ(r.statistic, 55.0);
    EXPECT_EQ(r.n_effective, 10u);
    EXPECT_TRUE(r.exact);
}

TEST(CApi, FuseCohortCsv)
{
    const auto cohort = load("weights_nihss.csv");
    const auto cfg = config();
    ASSERT_EQ(sf_config_set_norm_bounds(cfg.get(), 0, 26), SF_OK);
    ASSERT_EQ(sf_config_set_tau(cfg.get(), 0.40), SF_OK);
    ASSERT_EQ(sf_config_set_tau_star(cfg.get(), 0.40), SF_OK);
    char* out = nullptr;
    ASSERT_EQ(sf_fuse_cohort(cohort.get(), cfg.get(), SF_FORMAT_CSV, &out), SF_OK) << sf_last_error();
    OwnedString owned(out);
    const std::string csv(out);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "patient_id,p_adc,p_cbf,p_cbv,p_dwi,p_tmax,w_adc,w_cbf,w_cbv,w_dwi,w_tmax,p_mrs,"
              "label_unweighted,label_weighted");
    EXPECT_NE(csv.find("\n023,"), std::string::npos);
}

TEST(CApi, CvCompareAndSynth)
{
    char* csv = nullptr;
    const std::uint64_t seed = 3;
    ASSERT_EQ(sf_synth_csv("{\"n_patients\": 80}", &seed, &csv), SF_OK) << sf_last_error();
    OwnedString owned_csv(csv);
    EXPECT_EQ(sf_synth_csv("{\"prevalence_poor\": 0}", nullptr, &csv), SF_ERROR_CONFIG);

    sf_cohort* raw = nullptr;
    ASSERT_EQ(sf_cohort_parse_csv(owned_csv.get(), &raw), SF_OK);
    CohortHandle cohort(raw);
    EXPECT_EQ(sf_cohort_patient_count(cohort.get()), 80u);

    const auto cfg = config();
    ASSERT_EQ(sf_config_set_runs(cfg.get(), 3), SF_OK);
    char* json = nullptr;
    char* table = nullptr;
    ASSERT_EQ(sf_cv_run(cohort.get(), cfg.get(), &json, nullptr, &table), SF_OK) << sf_last_error();
    OwnedString owned_json(json), owned_table(table);
    const auto report = nlohmann::json::parse(json);
    EXPECT_EQ(report["schema"], "strokefusion.cv/1");
    EXPECT_EQ(report["models"].size(), 7u);
    EXPECT_NE(std::string(table).find("ensemble_w_nihss"), std::string::npos);

    char* result = nullptr;
    ASSERT_EQ(sf_compare_summaries(json, json, "auc", "ensemble_w_nihss", "ensemble", &result), SF_OK)
        << sf_last_error();
    OwnedString owned_result(result);
    const auto cmp = nlohmann::json::parse(result);
    EXPECT_EQ(cmp["model_a"], "ensemble_w_nihss");
    EXPECT_EQ(cmp["model_b"], "ensemble");
    EXPECT_EQ(cmp["n_effective"].get<int>() <= 3, true);

    EXPECT_EQ(sf_compare_summaries(json, json, "kappa", nullptr, nullptr, &result), SF_ERROR_CONFIG);
}
