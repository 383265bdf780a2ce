#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ineq/serialize.hpp"

namespace ineq::cli {

inline constexpr std::string_view kVersion = INEQ_VERSION;

struct Common {
    std::string output_dir = ".";
    std::size_t threads = 0;
    bool quiet = false;
};

/// One invocation: resolves output paths and writes the run manifest
/// (<output-dir>/<subcommand>.manifest.json) when finished.
class Run {
public:
    Run(Common common, std::string subcommand, int argc, char** argv);

    [[nodiscard]] const Common& common() const noexcept { return common_; }
    [[nodiscard]] std::filesystem::path output(const std::string& given, const std::string& default_name) const;

    void input(const std::string& role, const std::filesystem::path& path);
    void parameter(const std::string& key, Json value);
    void seed(std::uint64_t s);
    void wrote(const std::filesystem::path& path);
    void emit(const Json& result) const;
    void finish(const std::string& status, const std::string& message = {});

private:
    Common common_;
    std::string subcommand_;
    std::vector<std::string> argv_;
    Json inputs_ = Json::object();
    Json parameters_ = Json::object();
    Json outputs_ = Json::array();
    std::optional<std::uint64_t> seed_;
    std::chrono::steady_clock::time_point start_;
    bool finished_ = false;
};

struct SynthOptions {
    std::string spec;
    std::optional<std::size_t> size;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> variables;
    std::string out;
    std::string strata_out;
    std::string truth_out;
};

struct SampleOptions {
    std::string spec;
    std::optional<std::size_t> size;
    std::optional<std::uint64_t> population_seed;
    std::uint64_t seed = 0;
    std::vector<std::string> variables;
    std::size_t implicates = 1;
    std::string impute_variable = "income";
    double missing = 0.2;
    std::string out;
    std::string strata_out;
};

struct SharesOptions {
    std::string input;
    std::string variable = "income";
    std::vector<double> ks;
    std::string dataset;
    std::string out;
};

struct BootstrapCmdOptions {
    std::string input;
    std::string variable = "income";
    std::vector<double> ks;
    std::size_t replicates = 999;
    std::uint64_t seed = 0;
    double level = 0.95;
    std::string strata;
    std::string clusters = "auto";
    bool percentile = false;
    std::string replicates_out;
    std::string dataset;
    std::string out;
};

struct CapitalizeOptions {
    std::string input;
    std::string spec;
    std::string column = "wealth_cap";
    std::string out;
    std::string rates_out;
};

struct TrendOptions {
    std::string input;
    std::string x = "year";
    std::string y = "estimate";
    std::string se;
    bool ols = false;
    double level = 0.95;
    std::string out;
    std::string band_out;
};

struct SimulateOptions {
    std::string calib;
    std::uint64_t seed = 0;
    std::optional<std::size_t> draws;
    std::vector<double> sigma_high;
    std::optional<double> calibrate_target;
    std::string out;
};

void run_synth(Run& run, const SynthOptions& o);
void run_sample(Run& run, const SampleOptions& o);
void run_shares(Run& run, const SharesOptions& o);
void run_bootstrap_cmd(Run& run, const BootstrapCmdOptions& o);
void run_capitalize(Run& run, const CapitalizeOptions& o);
void run_trend(Run& run, const TrendOptions& o);
void run_simulate(Run& run, const SimulateOptions& o);

}  // namespace ineq::cli
