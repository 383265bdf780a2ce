#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "ineq/errors.hpp"
#include "ineq/synthetic.hpp"
#include "oracles.hpp"

using namespace ineq;

namespace {

SyntheticPopulationSpec single_bracket(std::size_t size, double rate) {
    SyntheticPopulationSpec s;
    s.population_size = size;
    StratumBracket b;
    b.lower = 0.0;
    b.upper = std::numeric_limits<double>::infinity();
    b.special_forms_prob = 0.0;
    b.usefulness_probs = {1.0};
    b.sampling_rate = rate;
    s.strata_design = {b};
    s.seed = 17;
    return s;
}

}  // namespace

TEST(Synthetic, SameSeedIsIdentical) {
    auto spec = default_population_spec();
    spec.population_size = 20000;
    const auto a = generate_population(spec);
    const auto b = generate_population(spec);
    for (const auto& name : a.value_columns()) {
        const auto x = a.column(name);
        const auto y = b.column(name);
        ASSERT_TRUE(std::equal(x.begin(), x.end(), y.begin())) << name;
    }
    EXPECT_EQ(a.stratum, b.stratum);
    const auto m1 = format_microdata(population_as_microdata(a));
    const auto m2 = format_microdata(population_as_microdata(b));
    EXPECT_EQ(m1, m2);
}

TEST(Synthetic, ZeroTailWeightIsLognormal) {
    auto spec = single_bracket(100000, 1.0);
    spec.tail_mix_weight = 0.0;
    const auto pop = generate_population(spec);
    double s = 0.0, s2 = 0.0;
    for (double y : pop.income) {
        s += std::log(y);
        s2 += std::log(y) * std::log(y);
    }
    const double n = static_cast<double>(pop.size());
    const double mean = s / n;
    EXPECT_NEAR(mean, spec.meanlog, 4.0 * spec.sdlog / std::sqrt(n));
    EXPECT_NEAR(std::sqrt(s2 / n - mean * mean), spec.sdlog, 0.01);
}

TEST(Synthetic, HillEstimatorRecoversTailExponent) {
    auto spec = default_population_spec();
    spec.population_size = 1000000;
    spec.seed = 42;
    spec.assets.clear();
    const auto pop = generate_population(spec);
    const double xi = oracle::hill(pop.income, pop.size() / 100);
    EXPECT_NEAR(xi, 2.5, 0.1);
}

TEST(Synthetic, CensusSampleEqualsPopulation) {
    auto spec = default_population_spec();
    spec.population_size = 5000;
    for (auto& b : spec.strata_design) b.sampling_rate = 1.0;
    const auto pop = generate_population(spec);
    const auto sample = draw_stratified_sample(pop, SamplingDesign::from_spec(spec), 1);
    ASSERT_EQ(sample.data.size(), pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) EXPECT_EQ(sample.data.weights(0)[i], 1.0);
    const auto inc = sample.data.values(0, "income");
    EXPECT_TRUE(std::equal(inc.begin(), inc.end(), pop.income.begin()));
}

TEST(Synthetic, SampleSizeWithinBinomialBand) {
    const auto spec = single_bracket(10000, 0.1);
    const auto pop = generate_population(spec);
    const double sd = std::sqrt(10000 * 0.1 * 0.9);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = draw_stratified_sample(pop, SamplingDesign::from_spec(spec), seed);
        EXPECT_NEAR(static_cast<double>(s.data.size()), 1000.0, 3.0 * sd);
        for (double w : s.data.weights(0)) ASSERT_DOUBLE_EQ(w, 10.0);
    }
}

TEST(Synthetic, SeedsGiveDifferentSamples) {
    const auto spec = single_bracket(10000, 0.1);
    const auto pop = generate_population(spec);
    const auto a = draw_stratified_sample(pop, SamplingDesign::from_spec(spec), 1);
    const auto b = draw_stratified_sample(pop, SamplingDesign::from_spec(spec), 2);
    const auto c = draw_stratified_sample(pop, SamplingDesign::from_spec(spec), 1);
    EXPECT_NE(std::vector<std::int64_t>(a.data.ids().begin(), a.data.ids().end()),
              std::vector<std::int64_t>(b.data.ids().begin(), b.data.ids().end()));
    EXPECT_EQ(format_microdata(a.data), format_microdata(c.data));
}

TEST(Synthetic, EmptyStratumIsAWarning) {
    auto spec = default_population_spec();
    spec.population_size = 3000;
    const auto pop = generate_population(spec);
    const auto s = draw_stratified_sample(pop, SamplingDesign::from_spec(spec), 4);
    EXPECT_FALSE(s.warnings.empty());
    std::size_t total = 0;
    for (const auto& p : s.strata) total += p.size;
    EXPECT_EQ(total, s.data.size());
}

TEST(Synthetic, StrataPartitionThePopulation) {
    auto spec = default_population_spec();
    spec.population_size = 50000;
    const auto pop = generate_population(spec);
    const auto strata = population_strata(pop);
    std::size_t total = 0;
    for (const auto& p : strata) {
        total += p.size;
        EXPECT_GE(p.income_bracket_rank, 1);
        EXPECT_LE(p.income_bracket_rank, 8);
        EXPECT_EQ(p.stratum_id, encode_stratum(p.income_bracket_rank, p.special_forms_flag, p.usefulness_code, 3));
    }
    EXPECT_EQ(total, pop.size());
}

TEST(Synthetic, AssetIncomesFollowTrueRates) {
    auto spec = default_population_spec();
    spec.population_size = 1000;
    const auto pop = generate_population(spec);
    for (std::size_t a = 0; a < spec.assets.size(); ++a) {
        double holdings = 0.0;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            EXPECT_NEAR(pop.asset_income[a][i], pop.asset_holding[a][i] * spec.assets[a].true_rate,
                        1e-12 * pop.asset_holding[a][i]);
            holdings += pop.asset_holding[a][i];
        }
        EXPECT_GT(holdings, 0.0);
    }
    for (std::size_t i = 0; i < pop.size(); ++i) {
        double sum = 0.0;
        for (std::size_t a = 0; a < spec.assets.size(); ++a) sum += pop.asset_holding[a][i];
        EXPECT_NEAR(sum, pop.wealth[i], 1e-9 * pop.wealth[i]);
    }
}

TEST(OracleTopShare, EqualValues) {
    EXPECT_NEAR(oracle_top_share(std::vector<double>(10, 1.0), 0.9), 0.1, 1e-15);
}

TEST(OracleTopShare, ExpandedWorkedExample) {
    const auto rows = oracle::expand({1, 2, 5, 10}, {3, 3, 2, 2});
    EXPECT_NEAR(oracle_top_share(rows, 0.9), 10.0 / 39.0, 1e-15);
}

TEST(OracleTopShare, HalfOfFourUnits) {
    EXPECT_NEAR(oracle_top_share(std::vector<double>{1, 1, 1, 3}, 0.5), 4.0 / 6.0, 1e-15);
}

TEST(OracleTopShare, FractionalBoundaryUnit) {
    // top 25% of 10 units = 2.5 units: 10 + 9 + 0.5 * 8
    std::vector<double> v(10);
    std::iota(v.begin(), v.end(), 1.0);
    EXPECT_NEAR(oracle_top_share(v, 0.75), 23.0 / 55.0, 1e-15);
    EXPECT_NEAR(oracle::top_share_units(v, 0.75), 23.0 / 55.0, 1e-15);
}

TEST(OracleTopShare, NonfiniteRejected) {
    EXPECT_THROW(oracle_top_share(std::vector<double>{1, NAN}, 0.5), ValidationError);
    EXPECT_THROW(oracle_top_share(std::vector<double>{1, INFINITY}, 0.5), ValidationError);
}

TEST(SynthesizeImplicates, FillsOnlyMissingFromSameStratum) {
    auto spec = default_population_spec();
    spec.population_size = 50000;
    const auto pop = generate_population(spec);
    const std::string vars[] = {"income", "wealth"};
    const auto s = draw_stratified_sample(pop, SamplingDesign::from_spec(spec), 3, vars);
    const auto mi = synthesize_implicates(s.data, "income", 0.3, 5, 11);
    ASSERT_EQ(mi.implicate_count(), 5u);
    ASSERT_EQ(mi.size(), s.data.size());
    std::size_t changed = 0;
    for (std::size_t i = 0; i < mi.size(); ++i) {
        bool same = true;
        for (std::size_t m = 1; m < 5; ++m) same = same && mi.values(m, "income")[i] == mi.values(0, "income")[i];
        if (!same) ++changed;
        for (std::size_t m = 0; m < 5; ++m) {
            ASSERT_EQ(mi.values(m, "wealth")[i], s.data.values(0, "wealth")[i]);
            ASSERT_EQ(mi.weights(m)[i], s.data.weights(0)[i]);
        }
    }
    EXPECT_GT(changed, 0u);
    EXPECT_LT(changed, mi.size() / 2);
}
