#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "ineq/bootstrap.hpp"
#include "ineq/errors.hpp"
#include "ineq/rng.hpp"
#include "ineq/synthetic.hpp"
#include "oracles.hpp"

using namespace ineq;

namespace {

MicrodataSet small_survey(std::size_t implicates, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<MicrodataRecord> rows;
    const std::size_t n = 300;
    std::vector<double> base(n), weight(n);
    for (std::size_t i = 0; i < n; ++i) {
        base[i] = rng.pareto(1.0, 2.0);
        weight[i] = 1.0 + static_cast<double>(i % 5);
    }
    for (std::size_t m = 1; m <= implicates; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            MicrodataRecord r;
            r.id = static_cast<std::int64_t>(i + 1);
            r.implicate = static_cast<int>(m);
            r.weight = weight[i];
            r.stratum = static_cast<int>(i % 6) + 1;
            r.values = {base[i] * (i % 10 == 0 ? 1.0 + 0.2 * rng.uniform() : 1.0)};
            rows.push_back(r);
        }
    }
    return MicrodataSet::from_records(rows, {"income"}, true);
}

}  // namespace

TEST(ReplicateDesign, DrawsStayWithinClusters) {
    const auto data = small_survey(1, 1);
    const auto design = ReplicateDesign::by_stratum(data);
    ASSERT_EQ(design.cluster_count(), 6u);
    std::vector<std::uint32_t> idx;
    design.draw(9, 3, idx);
    ASSERT_EQ(idx.size(), data.size());
    std::size_t pos = 0;
    for (std::size_t j = 0; j < design.cluster_count(); ++j) {
        const std::set<std::uint32_t> members(design.members(j).begin(), design.members(j).end());
        for (std::size_t k = 0; k < design.members(j).size(); ++k) EXPECT_TRUE(members.count(idx[pos++]));
    }
}

TEST(ReplicateDesign, CountsAgreeWithIndices) {
    const auto design = ReplicateDesign::single_cluster(50);
    std::vector<std::uint32_t> idx, counts;
    design.draw(4, 17, idx);
    design.draw_counts(4, 17, counts);
    std::vector<std::uint32_t> tally(50, 0);
    for (auto i : idx) ++tally[i];
    EXPECT_EQ(tally, counts);
}

TEST(ReplicateDesign, ReplicateDependsOnlyOnSeedAndIndex) {
    const auto design = ReplicateDesign::single_cluster(100);
    const auto set = make_replicates(design, 20, 77, 1);
    std::vector<std::uint32_t> again;
    design.draw(77, 13, again);
    EXPECT_EQ(set.replicates[12], again);
    EXPECT_NE(set.replicates[0], set.replicates[1]);
}

TEST(ReplicateDesign, ClusterAssignmentMustCoverStrata) {
    const auto data = small_survey(1, 2);
    ClusterAssignment a;
    a.cluster_count = 2;
    for (int s = 1; s <= 5; ++s) a.cluster_of[s] = 1 + s % 2;
    EXPECT_THROW(ReplicateDesign::from_assignment(data, a), ValidationError);
    a.cluster_of[6] = 1;
    const auto d = ReplicateDesign::from_assignment(data, a);
    EXPECT_EQ(d.cluster_count(), 2u);
    EXPECT_EQ(d.members(0).size() + d.members(1).size(), data.size());
}

TEST(ReplicateSet, BinaryRoundTrip) {
    const auto set = make_replicates(ReplicateDesign::single_cluster(33), 7, 5, 1);
    const auto path = std::filesystem::temp_directory_path() / "ineq_replicates.bin";
    write_replicates(set, path);
    const auto back = read_replicates(path);
    EXPECT_EQ(back.seed, 5u);
    EXPECT_EQ(back.n, 33u);
    EXPECT_EQ(back.replicates, set.replicates);
    EXPECT_EQ(std::filesystem::file_size(path), 8u + 24u + 7u * 33u * 4u);
    std::filesystem::remove(path);
}

TEST(Bootstrap, ReplicatesMatchDirectReestimation) {
    const auto data = small_survey(3, 3);
    const auto design = ReplicateDesign::by_stratum(data);
    BootstrapOptions o;
    o.ks = {0.9, 0.99};
    o.replicates = 25;
    o.seed = 11;
    const auto res = run_bootstrap(data, design, o);
    std::vector<std::uint32_t> idx;
    for (std::size_t l = 0; l < o.replicates; ++l) {
        design.draw(o.seed, l + 1, idx);
        for (std::size_t q = 0; q < o.ks.size(); ++q) {
            double mean = 0.0;
            for (std::size_t m = 0; m < 3; ++m) {
                std::vector<double> v, w;
                std::vector<std::int64_t> ids;
                for (auto i : idx) {
                    v.push_back(data.values(m, 0)[i]);
                    w.push_back(data.weights(m)[i]);
                    ids.push_back(data.ids()[i]);
                }
                mean += estimate_top_share(v, w, o.ks[q], ids) / 3.0;
            }
            EXPECT_NEAR(res.replicate_values[q][l], mean, 1e-12) << "l=" << l << " q=" << q;
        }
    }
}

TEST(Bootstrap, ErrorComponentsFollowDefinitions) {
    const auto data = small_survey(4, 5);
    BootstrapOptions o;
    o.replicates = 60;
    o.seed = 3;
    const auto res = run_bootstrap(data, ReplicateDesign::by_stratum(data), o);
    const auto& e = res.estimates[0];
    EXPECT_NEAR(*e.sigma1, oracle::sample_sd(res.replicate_values[0]), 1e-14);
    EXPECT_NEAR(*e.sigma2, oracle::sample_sd(e.per_implicate), 1e-14);
    EXPECT_NEAR(*e.sigma, std::sqrt(*e.sigma1 * *e.sigma1 + *e.sigma2 * *e.sigma2 * 1.25), 1e-15);
    EXPECT_NEAR(res.intervals[0].lo, e.point - kZ975 * *e.sigma, 1e-15);
    EXPECT_NEAR(res.intervals[0].hi, e.point + kZ975 * *e.sigma, 1e-15);
    EXPECT_EQ(e.replicates, 60u);
}

TEST(Bootstrap, ThreadCountDoesNotChangeResults) {
    const auto data = small_survey(2, 6);
    BootstrapOptions o;
    o.ks = {0.9, 0.99};
    o.replicates = 40;
    o.seed = 8;
    o.threads = 1;
    const auto a = run_bootstrap(data, ReplicateDesign::by_stratum(data), o);
    o.threads = 4;
    const auto b = run_bootstrap(data, ReplicateDesign::by_stratum(data), o);
    EXPECT_EQ(a.replicate_values, b.replicate_values);
    EXPECT_EQ(*a.estimates[1].sigma, *b.estimates[1].sigma);
}

TEST(Bootstrap, SingleImplicateWarns) {
    const auto data = small_survey(1, 7);
    BootstrapOptions o;
    o.replicates = 10;
    const auto res = run_bootstrap(data, ReplicateDesign::by_stratum(data), o);
    EXPECT_EQ(*res.estimates[0].sigma2, 0.0);
    EXPECT_EQ(*res.estimates[0].sigma, *res.estimates[0].sigma1);
    EXPECT_FALSE(res.warnings.empty());
}

TEST(Bootstrap, PercentileIntervalOption) {
    const auto data = small_survey(1, 8);
    BootstrapOptions o;
    o.replicates = 200;
    o.percentile_interval = true;
    const auto res = run_bootstrap(data, ReplicateDesign::by_stratum(data), o);
    EXPECT_DOUBLE_EQ(res.intervals[0].lo, empirical_quantile(res.replicate_values[0], 0.025));
    EXPECT_DOUBLE_EQ(res.intervals[0].hi, empirical_quantile(res.replicate_values[0], 0.975));
}

TEST(Bootstrap, InvalidOptions) {
    const auto data = small_survey(1, 9);
    BootstrapOptions o;
    o.replicates = 1;
    EXPECT_THROW(run_bootstrap(data, ReplicateDesign::by_stratum(data), o), ValidationError);
    o.replicates = 10;
    EXPECT_THROW(run_bootstrap(data, ReplicateDesign::single_cluster(5), o), ValidationError);
    o.ks = {1.5};
    EXPECT_THROW(run_bootstrap(data, ReplicateDesign::by_stratum(data), o), ValidationError);
}
