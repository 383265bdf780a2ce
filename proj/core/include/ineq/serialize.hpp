#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ineq/capitalize.hpp"
#include "ineq/clustering.hpp"
#include "ineq/envelope.hpp"
#include "ineq/error_components.hpp"
#include "ineq/synthetic.hpp"
#include "ineq/topshare.hpp"
#include "ineq/trend.hpp"

namespace ineq {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Specs read from JSON. Absent keys keep their defaults; unknown keys are
// rejected so that typos do not pass silently.

Json to_json(const SyntheticPopulationSpec& spec);
/// Starts from default_population_spec().
SyntheticPopulationSpec population_spec_from_json(const Json& j);

Json to_json(const CapitalizationSpec& spec);
CapitalizationSpec capitalization_spec_from_json(const Json& j);

struct ExperimentSpec {
    CalibrationInput calibration;
    ShockExperiment experiment;
};

Json to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_spec_from_json(const Json& j);

// Results.

/// {variable, k, point, per_implicate, sigma1, sigma2, sigma, n, N}; absent
/// error components are null.
Json to_json(const ShareEstimate& e);
Json to_json(const ShareEstimate& e, const Interval& ci, double level);
Json to_json(const ClusterAssignment& a);
Json to_json(const RateSolution& r);
/// Infinite t-statistics (exact fits) are written as null.
Json to_json(const RegressionResult& r);

// Tabular text.

/// Columns: stratum_id, size, income_bracket_rank, special_forms_flag, usefulness_code.
std::vector<StratumProfile> parse_strata_csv(std::string_view text);
std::string format_strata_csv(std::span<const StratumProfile> strata);

/// A header plus numeric columns, for small inputs such as annual series.
struct NumericTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    [[nodiscard]] const std::vector<double>& column(std::string_view name) const;
    [[nodiscard]] bool has(std::string_view name) const noexcept;
};

NumericTable parse_numeric_table(std::string_view text);

/// Columns: year, fitted, lower95, upper95.
std::string format_trend_csv(std::span<const TrendPoint> band);
/// Columns: year, sigmaH, median, lo95, hi95; one block per sigma_high.
std::string format_envelope_csv(const Envelope& envelope);

}  // namespace ineq
