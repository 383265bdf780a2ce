#include <gtest/gtest.h>

#include <filesystem>

#include "ineq/errors.hpp"
#include "ineq/serialize.hpp"

using namespace ineq;

TEST(Serialize, PopulationSpecRoundTrip) {
    auto spec = default_population_spec();
    spec.population_size = 1234;
    spec.seed = 99;
    const auto back = population_spec_from_json(to_json(spec));
    EXPECT_EQ(to_json(back), to_json(spec));
    EXPECT_EQ(back.strata_design.size(), spec.strata_design.size());
    EXPECT_TRUE(std::isinf(back.strata_design.back().upper));
}

TEST(Serialize, PopulationSpecRejectsUnknownKeys) {
    EXPECT_THROW(population_spec_from_json(Json{{"populaton_size", 10}}), ValidationError);
    EXPECT_THROW(population_spec_from_json(Json{{"population_size", "ten"}}), ValidationError);
    EXPECT_EQ(population_spec_from_json(Json::object()).population_size, default_population_spec().population_size);
}

TEST(Serialize, CapitalizationSpecRoundTrip) {
    CapitalizationSpec s;
    s.categories = {"dividends", "taxable_interest"};
    s.fa_totals = {{"dividends", 5e9}, {"taxable_interest", 3e9}};
    s.regime = RateRegime::Heterogeneous;
    s.heterogeneous = {{"taxable_interest", 0.01, 0.025}};
    s.nonfin = {NonfinancialRule::Kind::Column, "housing", 0.0};
    const auto back = capitalization_spec_from_json(to_json(s));
    EXPECT_EQ(to_json(back), to_json(s));
    EXPECT_EQ(back.regime, RateRegime::Heterogeneous);
    EXPECT_EQ(back.nonfin.column, "housing");
}

TEST(Serialize, ShippedExperimentConfigsParse) {
    for (const char* name : {"experiment_puf1973.json", "experiment_scf1973.json"}) {
        const auto spec = experiment_spec_from_json(read_json_file(std::filesystem::path(INEQ_CONFIG_DIR) / name));
        EXPECT_DOUBLE_EQ(spec.calibration.eta_hat, 0.39) << name;
        EXPECT_EQ(spec.calibration.draws, 100u);
        EXPECT_EQ(spec.calibration.sigma_high_set.size(), 3u);
        EXPECT_DOUBLE_EQ(spec.experiment.start_year, 1973.0);
        EXPECT_DOUBLE_EQ(spec.experiment.end_year, 2050.0);
        EXPECT_GT(spec.experiment.delta_mu, 0.0);
        EXPECT_EQ(to_json(experiment_spec_from_json(to_json(spec))), to_json(spec));
    }
}

TEST(Serialize, ExperimentSpecNeedsEtaAndSe) {
    EXPECT_THROW(experiment_spec_from_json(Json{{"calibration", {{"eta_hat", 0.39}}}}), ValidationError);
    EXPECT_THROW(experiment_spec_from_json(Json{{"calibration", {{"eta_hat", 0.39}, {"se", 0.01}}}, {"extra", 1}}),
                 ValidationError);
    const auto ok = experiment_spec_from_json(Json{{"calibration", {{"eta_hat", 0.4}, {"se", 0.01}}}});
    EXPECT_DOUBLE_EQ(ok.calibration.eta_hat, 0.4);
}

TEST(Serialize, ShareEstimateJson) {
    ShareEstimate e;
    e.variable = "income";
    e.k = 0.99;
    e.point = 0.2;
    e.per_implicate = {0.19, 0.21};
    const auto plain = to_json(e);
    EXPECT_TRUE(plain["sigma"].is_null());
    EXPECT_FALSE(plain.contains("replicates"));
    e.sigma1 = 0.01;
    e.sigma2 = 0.01;
    e.sigma = 0.015;
    e.replicates = 999;
    const auto j = to_json(e, Interval{0.17, 0.23}, 0.95);
    EXPECT_DOUBLE_EQ(j["sigma"].get<double>(), 0.015);
    EXPECT_EQ(j["replicates"].get<int>(), 999);
    EXPECT_DOUBLE_EQ(j["ci"][1].get<double>(), 0.23);
}

TEST(Serialize, InfiniteTIsNull) {
    RegressionResult r;
    r.t_slope = std::numeric_limits<double>::infinity();
    r.t_intercept = 2.0;
    const auto j = to_json(r);
    EXPECT_TRUE(j["t_slope"].is_null());
    EXPECT_DOUBLE_EQ(j["t_intercept"].get<double>(), 2.0);
}

TEST(Serialize, StrataCsvRoundTrip) {
    std::vector<StratumProfile> s{{3, 40, 2, 1, 0}, {7, 12, 8, 0, 2}};
    const auto text = format_strata_csv(s);
    const auto back = parse_strata_csv(text);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].stratum_id, 7);
    EXPECT_EQ(back[1].size, 12u);
    EXPECT_EQ(back[1].income_bracket_rank, 8);
    EXPECT_EQ(back[1].usefulness_code, 2);
    EXPECT_EQ(format_strata_csv(back), text);
}

TEST(Serialize, StrataCsvErrors) {
    const std::string header = "stratum_id,size,income_bracket_rank,special_forms_flag,usefulness_code\n";
    EXPECT_THROW(parse_strata_csv(header + "1,5,1,0,0\n1,6,2,0,0\n"), ValidationError);
    EXPECT_THROW(parse_strata_csv(header + "1,5,0,0,0\n"), ValidationError);
    EXPECT_THROW(parse_strata_csv("id,size\n1,2\n"), ValidationError);
}

TEST(Serialize, NumericTable) {
    const auto t = parse_numeric_table("year,estimate,se\n1990,0.1,0.01\n1991,0.12,0.02\n");
    EXPECT_TRUE(t.has("se"));
    EXPECT_FALSE(t.has("weight"));
    EXPECT_EQ(t.column("year"), (std::vector<double>{1990, 1991}));
    EXPECT_THROW((void)t.column("nope"), ValidationError);
    EXPECT_THROW(parse_numeric_table("a,b\n1\n"), ValidationError);
    EXPECT_THROW(parse_numeric_table("a,b\n1,x\n"), ValidationError);
}

TEST(Serialize, EnvelopeCsv) {
    Envelope env;
    EnvelopeBand b;
    b.sigma_high = 0.15;
    b.years = {2000, 2001};
    b.median = {0.1, 0.2};
    b.lower = {0.05, 0.15};
    b.upper = {0.15, 0.25};
    env.bands = {b};
    EXPECT_EQ(format_envelope_csv(env), "year,sigmaH,median,lo95,hi95\n2000,0.15,0.1,0.05,0.15\n2001,0.15,0.2,0.15,0.25\n");
    const TrendPoint p[] = {{1990, 1.5, 1.0, 2.0}};
    EXPECT_EQ(format_trend_csv(p), "year,fitted,lower95,upper95\n1990,1.5,1,2\n");
}
