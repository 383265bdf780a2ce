#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ineq/microdata.hpp"

namespace ineq {

/// Design attributes of one sampling stratum, used as clustering input.
struct StratumProfile {
    int stratum_id = 0;
    std::size_t size = 0;          // n_j, sampled observations
    int income_bracket_rank = 1;   // ordinal, 1..R
    int special_forms_flag = 0;    // nominal
    int usefulness_code = 0;       // nominal
};

/// One income bracket of the synthetic sampling design. Units in
/// [lower, upper) are split into strata by their nominal attributes.
struct StratumBracket {
    double lower = 0.0;
    double upper = 0.0;  // +inf for the top bracket
    double special_forms_prob = 0.0;
    std::vector<double> usefulness_probs{1.0};
    double sampling_rate = 1.0;  // (0, 1]
};

/// Asset class used to derive per-category capital income from wealth.
struct AssetCategorySpec {
    std::string name;
    double portfolio_share = 0.0;
    double true_rate = 0.05;
    /// When set, units in the top `top_fraction` of wealth earn this rate
    /// instead (ground truth for the heterogeneous regime).
    std::optional<double> top_rate;
    double top_fraction = 0.01;
};

struct SyntheticPopulationSpec {
    std::size_t population_size = 100000;
    double meanlog = 10.5;
    double sdlog = 0.8;
    double tail_exponent = 2.5;  // Pareto xi_pop > 1
    double tail_mix_weight = 0.05;
    /// Pareto minimum. Zero selects exp(meanlog + 3*sdlog), far enough into
    /// the body that the top percentile is essentially all tail.
    double tail_scale = 0.0;
    std::vector<StratumBracket> strata_design;
    std::vector<AssetCategorySpec> assets;
    double wealth_income_ratio = 4.0;
    double wealth_noise_sdlog = 0.5;
    double portfolio_noise_sdlog = 0.3;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Full enumeration of a synthetic population. Column-oriented; units are
/// indexed 0..size-1 with ids 1..size.
struct Population {
    std::vector<std::int64_t> ids;
    std::vector<double> income;
    std::vector<double> wealth;
    std::vector<int> stratum;
    std::vector<int> bracket;  // 1..R
    std::vector<int> special_forms;
    std::vector<int> usefulness;
    std::vector<std::string> asset_names;
    std::vector<std::vector<double>> asset_income;   // [a][i]
    std::vector<std::vector<double>> asset_holding;  // [a][i]

    [[nodiscard]] std::size_t size() const noexcept { return ids.size(); }
    [[nodiscard]] std::span<const double> column(const std::string& name) const;
    [[nodiscard]] std::vector<std::string> value_columns() const;
};

/// Stratum id for a (bracket, flag, code) triple; dense, 1-based.
int encode_stratum(int bracket, int special_forms, int usefulness, int usefulness_levels);

Population generate_population(const SyntheticPopulationSpec& spec);

/// Profiles of every stratum present in the population (size = population count).
std::vector<StratumProfile> population_strata(const Population& population);

/// Unit-weight MicrodataSet holding the whole population.
MicrodataSet population_as_microdata(const Population& population,
                                     std::span<const std::string> variables = {});

struct SamplingDesign {
    /// Selection probability per income bracket (index = rank - 1).
    std::vector<double> bracket_rates;

    static SamplingDesign from_spec(const SyntheticPopulationSpec& spec);
};

struct StratifiedSample {
    MicrodataSet data;
    std::vector<StratumProfile> strata;  // sizes are sampled counts
    std::vector<std::string> warnings;
};

/// Poisson sampling: each unit is kept independently with its bracket's
/// rate and weighted 1/rate. Empty strata are reported as warnings.
StratifiedSample draw_stratified_sample(const Population& population,
                                        const SamplingDesign& design,
                                        std::uint64_t seed,
                                        std::span<const std::string> variables = {});

/// Exact top share of a fully enumerated population: the top (1-k)*N units,
/// with the boundary unit's value split proportionally.
double oracle_top_share(std::span<const double> values, double k);

/// Builds M implicates of `variable`: a `missing_fraction` of respondents
/// are treated as nonrespondents and completed in each implicate by a random
/// donor from the same stratum. Test-data generator, not an imputation model.
MicrodataSet synthesize_implicates(const MicrodataSet& single,
                                   const std::string& variable,
                                   double missing_fraction,
                                   std::size_t implicates,
                                   std::uint64_t seed);

/// A small but complete default design: eight income brackets, binary
/// special-forms flag, three usefulness codes, seven asset classes.
SyntheticPopulationSpec default_population_spec();

}  // namespace ineq
