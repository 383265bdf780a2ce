#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ineq/microdata.hpp"

namespace ineq {

/// The seven asset classes of the household balance sheet used for
/// capitalization, in their conventional order.
inline const std::vector<std::string>& standard_asset_categories() {
    static const std::vector<std::string> names{
        "taxable_interest", "nontaxable_interest", "dividends", "s_corp", "partnership", "rental", "pension"};
    return names;
}

enum class RateRegime { Homogeneous, Heterogeneous };

/// A category whose rate of return differs between the top of the wealth
/// distribution (exogenous rate) and everyone else (solved from the
/// aggregate).
struct HeterogeneousRule {
    std::string category = "taxable_interest";
    double top_fraction = 0.01;
    double top_rate = 0.0;  // exogenous, e.g. a 10-year Treasury or Aaa yield
};

struct NonfinancialRule {
    enum class Kind { None, Column, Constant } kind = Kind::None;
    std::string column;
    double constant = 0.0;
};

struct CapitalizationSpec {
    std::vector<std::string> categories = standard_asset_categories();
    std::map<std::string, double> fa_totals;  // aggregate holdings per category
    RateRegime regime = RateRegime::Homogeneous;
    /// Exactly one rule in the standard setup; more are accepted but untested
    /// beyond the adding-up identity.
    std::vector<HeterogeneousRule> heterogeneous;
    NonfinancialRule nonfin;
    std::string income_prefix = "income_";
    std::size_t max_iterations = 50;

    void validate() const;
};

struct CategoryRate {
    double rate = 0.0;                 // homogeneous rate (or bottom rate when split)
    std::optional<double> top_rate;    // r_A, heterogeneous categories only
    std::optional<double> bottom_rate; // r_B
};

struct RateSolution {
    std::map<std::string, CategoryRate> rates;
    std::size_t iterations = 0;
    bool converged = true;
};

/// r = sum_i w_i income_i / FA, the rate at which capitalized incomes add up
/// to FA. Empty weights mean unit weights.
double estimate_rate(std::span<const double> incomes, std::span<const double> weights, double fa_total);

struct HeterogeneousRates {
    double top = 0.0;     // r_A, as given
    double bottom = 0.0;  // r_B solving the adding-up identity
};

/// Solves FA = sum_A w income / r_A + sum_B w income / r_B for r_B.
/// An empty top set reduces to estimate_rate.
HeterogeneousRates solve_heterogeneous_rates(std::span<const double> incomes,
                                             std::span<const double> weights,
                                             std::span<const char> top_member,
                                             double fa_total,
                                             double top_rate);

/// wealth = nonfin + sum_a income_a / r_a, with the top or bottom rate for
/// split categories according to `top_member`.
double capitalize_wealth(const std::map<std::string, double>& incomes,
                         const RateSolution& rates,
                         double nonfin,
                         bool top_member = false);

/// Members of the top `top_fraction` of the weighted wealth distribution.
/// A unit is included when the weight ranked strictly above it is below
/// top_fraction * N; ties ranked by id.
std::vector<char> classify_top(std::span<const double> wealth,
                               std::span<const double> weights,
                               double top_fraction,
                               std::span<const std::int64_t> ids = {});

struct CapitalizationResult {
    RateSolution rates;
    std::vector<double> wealth;
    std::vector<char> top_member;
    std::map<std::string, std::vector<double>> holdings;  // per category, per taxpayer
};

/// Capitalizes one implicate. Under the heterogeneous regime, top membership
/// and rates are iterated to a fixed point starting from the homogeneous
/// solution; non-convergence within max_iterations is flagged, not thrown.
CapitalizationResult capitalize(const ImplicateView& data, const CapitalizationSpec& spec);

/// Capitalizes every implicate and appends the estimates as a value column.
MicrodataSet capitalize_dataset(const MicrodataSet& data, const CapitalizationSpec& spec,
                                const std::string& output_column,
                                std::vector<RateSolution>* solutions = nullptr);

}  // namespace ineq
