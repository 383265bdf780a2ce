#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"
#include "ineq/errors.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitUsage = 64;

std::string default_output_dir() {
    if (const char* env = std::getenv("INEQ_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

}  // namespace

int main(int argc, char** argv) {
    using namespace ineq::cli;

    CLI::App app{"Top-share estimation with sampling and imputation errors, wealth capitalization, "
                 "trend regression and growth-model envelopes."};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    common.output_dir = default_output_dir();
    app.add_option("--output-dir", common.output_dir,
                   "Directory for outputs and the run manifest (default: $INEQ_OUTPUT_DIR or .)");
    app.add_option("--threads", common.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_flag("--quiet", common.quiet, "Do not echo JSON results to stdout");

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic population");
    synth_cmd->add_option("--spec", synth.spec, "Population spec JSON (absent keys take defaults)")
        ->check(CLI::ExistingFile);
    synth_cmd->add_option("--size", synth.size, "Override population_size");
    synth_cmd->add_option("--seed", synth.seed, "Override the spec seed");
    synth_cmd->add_option("--variables", synth.variables, "Value columns to write (default: all)");
    synth_cmd->add_option("--out", synth.out, "Population CSV (default: <output-dir>/population.csv)");
    synth_cmd->add_option("--strata-out", synth.strata_out, "Stratum profile CSV");
    synth_cmd->add_option("--truth-out", synth.truth_out, "True top shares JSON");

    SampleOptions sample;
    auto* sample_cmd = app.add_subcommand("sample", "Draw a stratified sample from a synthetic population");
    sample_cmd->add_option("--spec", sample.spec, "Population spec JSON")->check(CLI::ExistingFile);
    sample_cmd->add_option("--size", sample.size, "Override population_size");
    sample_cmd->add_option("--population-seed", sample.population_seed, "Override the spec seed");
    sample_cmd->add_option("--seed", sample.seed, "Sampling seed")->required();
    sample_cmd->add_option("--variables", sample.variables, "Value columns to keep (default: all)");
    sample_cmd->add_option("--implicates", sample.implicates, "Number of implicates M (hot-deck filled)")
        ->check(CLI::PositiveNumber);
    sample_cmd->add_option("--impute-variable", sample.impute_variable, "Variable to impute when M > 1");
    sample_cmd->add_option("--missing", sample.missing, "Nonresponse fraction when M > 1")->check(CLI::Range(0.0, 1.0));
    sample_cmd->add_option("--out", sample.out, "Sample CSV (default: <output-dir>/sample.csv)");
    sample_cmd->add_option("--strata-out", sample.strata_out, "Stratum profile CSV (default: <output-dir>/strata.csv)");

    SharesOptions shares;
    auto* shares_cmd = app.add_subcommand("shares", "Top-share point estimates with the multiple-imputation grand mean");
    shares_cmd->add_option("--input", shares.input, "Microdata CSV")->required()->check(CLI::ExistingFile);
    shares_cmd->add_option("--variable", shares.variable, "Value column");
    shares_cmd->add_option("--k", shares.ks, "Fractile(s) in (0, 1) (default: 0.9 0.95 0.99 0.995 0.999 0.9999)");
    shares_cmd->add_option("--dataset", shares.dataset, "Dataset label");
    shares_cmd->add_option("--out", shares.out, "Result JSON (default: <output-dir>/shares.json)");

    BootstrapCmdOptions boot;
    auto* boot_cmd = app.add_subcommand("bootstrap", "Sampling, imputation and combined errors by replicate resampling");
    boot_cmd->add_option("--input", boot.input, "Microdata CSV")->required()->check(CLI::ExistingFile);
    boot_cmd->add_option("--variable", boot.variable, "Value column");
    boot_cmd->add_option("--k", boot.ks, "Fractile(s) in (0, 1)");
    boot_cmd->add_option("--L", boot.replicates, "Replicate count")->check(CLI::Range(2, 1000000));
    boot_cmd->add_option("--seed", boot.seed, "Replicate seed")->required();
    boot_cmd->add_option("--level", boot.level, "Confidence level")->check(CLI::Range(0.0, 1.0));
    boot_cmd->add_option("--strata", boot.strata, "Stratum profile CSV; enables PAM clustering of strata")
        ->check(CLI::ExistingFile);
    boot_cmd->add_option("--clusters", boot.clusters, "Cluster count, or 'auto' for silhouette selection");
    boot_cmd->add_flag("--percentile", boot.percentile, "Percentile interval instead of point +/- z sigma");
    boot_cmd->add_option("--replicates-out", boot.replicates_out, "Cache replicate indices (binary)");
    boot_cmd->add_option("--dataset", boot.dataset, "Dataset label");
    boot_cmd->add_option("--out", boot.out, "Result JSON (default: <output-dir>/bootstrap.json)");

    CapitalizeOptions cap;
    auto* cap_cmd = app.add_subcommand("capitalize", "Capitalize capital income flows into wealth");
    cap_cmd->add_option("--input", cap.input, "Microdata CSV with income_<category> columns")
        ->required()
        ->check(CLI::ExistingFile);
    cap_cmd->add_option("--spec", cap.spec, "Capitalization spec JSON")->required()->check(CLI::ExistingFile);
    cap_cmd->add_option("--column", cap.column, "Name of the appended wealth column");
    cap_cmd->add_option("--out", cap.out, "Augmented CSV (default: <output-dir>/capitalized.csv)");
    cap_cmd->add_option("--rates-out", cap.rates_out, "Rates JSON (default: <output-dir>/rates.json)");

    TrendOptions trend;
    auto* trend_cmd = app.add_subcommand("trend", "Weighted or ordinary least-squares trend");
    trend_cmd->add_option("--input", trend.input, "CSV with a header")->required()->check(CLI::ExistingFile);
    trend_cmd->add_option("--x", trend.x, "Regressor column");
    trend_cmd->add_option("--y", trend.y, "Response column");
    trend_cmd->add_option("--se", trend.se, "Standard-error column (weights 1/se^2)");
    trend_cmd->add_flag("--ols", trend.ols, "Unit weights even if --se is given");
    trend_cmd->add_option("--level", trend.level, "Band level")->check(CLI::Range(0.0, 1.0));
    trend_cmd->add_option("--out", trend.out, "Report JSON (default: <output-dir>/trend.json)");
    trend_cmd->add_option("--band-out", trend.band_out, "Fitted line CSV (year, fitted, lower95, upper95)");

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo envelope of the growth-model transition");
    sim_cmd->add_option("--calib", sim.calib, "Experiment spec JSON")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--seed", sim.seed, "Draw seed")->required();
    sim_cmd->add_option("--draws", sim.draws, "Override the draw count B")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--sigma-high", sim.sigma_high, "Override the sigma_high set");
    sim_cmd->add_option("--calibrate-shock", sim.calibrate_target,
                        "Solve delta_mu so the baseline path ends at this share, print it and exit");
    sim_cmd->add_option("--out", sim.out, "Envelope CSV (default: <output-dir>/envelope.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    Run run(common, app.get_subcommands().front()->get_name(), argc, argv);
    try {
        if (*synth_cmd) {
            run_synth(run, synth);
        } else if (*sample_cmd) {
            run_sample(run, sample);
        } else if (*shares_cmd) {
            run_shares(run, shares);
        } else if (*boot_cmd) {
            run_bootstrap_cmd(run, boot);
        } else if (*cap_cmd) {
            run_capitalize(run, cap);
        } else if (*trend_cmd) {
            run_trend(run, trend);
        } else if (*sim_cmd) {
            run_simulate(run, sim);
        }
        run.finish("ok");
    } catch (const ineq::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        run.finish("validation_error", e.what());
        return kExitValidation;
    } catch (const ineq::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        run.finish("numerical_error", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        run.finish("validation_error", e.what());
        return kExitValidation;
    }
    return 0;
}
