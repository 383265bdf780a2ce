#include "commands.hpp"

#include <algorithm>
#include <iostream>

#include "ineq/bootstrap.hpp"
#include "ineq/errors.hpp"
#include "ineq/microdata.hpp"
#include "ineq/rng.hpp"

namespace ineq::cli {

namespace fs = std::filesystem;

Run::Run(Common common, std::string subcommand, int argc, char** argv)
    : common_(std::move(common)), subcommand_(std::move(subcommand)), start_(std::chrono::steady_clock::now()) {
    for (int i = 0; i < argc; ++i) argv_.emplace_back(argv[i]);
}

fs::path Run::output(const std::string& given, const std::string& default_name) const {
    if (!given.empty()) return given;
    return fs::path(common_.output_dir) / default_name;
}

void Run::input(const std::string& role, const fs::path& path) { inputs_[role] = path.string(); }

void Run::parameter(const std::string& key, Json value) { parameters_[key] = std::move(value); }

void Run::seed(std::uint64_t s) { seed_ = s; }

void Run::wrote(const fs::path& path) { outputs_.push_back(path.string()); }

void Run::emit(const Json& result) const {
    if (!common_.quiet) std::cout << result.dump(2) << '\n';
}

void Run::finish(const std::string& status, const std::string& message) {
    if (finished_) return;
    finished_ = true;
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json m;
    m["tool"] = "ineq";
    m["version"] = std::string(kVersion);
    m["subcommand"] = subcommand_;
    m["argv"] = argv_;
    m["inputs"] = inputs_;
    m["parameters"] = parameters_;
    m["seed"] = seed_ ? Json(*seed_) : Json(nullptr);
    m["threads"] = common_.threads;
    m["outputs"] = outputs_;
    m["status"] = status;
    if (!message.empty()) m["message"] = message;
    m["wall_time_seconds"] = seconds;
    try {
        write_text_file(fs::path(common_.output_dir) / (subcommand_ + ".manifest.json"), m.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "warning: could not write run manifest: " << e.what() << '\n';
    }
}

namespace {

std::vector<double> fractiles_or_default(const std::vector<double>& ks) {
    if (!ks.empty()) return ks;
    return {std::begin(kDefaultFractiles), std::end(kDefaultFractiles)};
}

SyntheticPopulationSpec load_population_spec(Run& run, const std::string& path, std::optional<std::size_t> size,
                                             std::optional<std::uint64_t> seed) {
    auto spec = default_population_spec();
    if (!path.empty()) {
        run.input("spec", path);
        spec = population_spec_from_json(read_json_file(path));
    }
    if (size) spec.population_size = *size;
    if (seed) spec.seed = *seed;
    spec.validate();
    run.parameter("population_spec", to_json(spec));
    return spec;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

void run_synth(Run& run, const SynthOptions& o) {
    const auto spec = load_population_spec(run, o.spec, o.size, o.seed);
    run.seed(spec.seed);
    const auto pop = generate_population(spec);

    const auto csv = run.output(o.out, "population.csv");
    write_microdata(population_as_microdata(pop, o.variables), csv);
    run.wrote(csv);

    if (!o.strata_out.empty()) {
        const auto strata = population_strata(pop);
        write_text_file(o.strata_out, format_strata_csv(strata));
        run.wrote(o.strata_out);
    }

    Json truth;
    truth["population_size"] = pop.size();
    for (const char* variable : {"income", "wealth"}) {
        Json shares = Json::array();
        for (double k : kDefaultFractiles) {
            shares.push_back({{"k", k}, {"share", oracle_top_share(pop.column(variable), k)}});
        }
        truth[variable] = shares;
    }
    if (!o.truth_out.empty()) {
        write_text_file(o.truth_out, truth.dump(2) + "\n");
        run.wrote(o.truth_out);
    }
    run.emit(truth);
}

void run_sample(Run& run, const SampleOptions& o) {
    const auto spec = load_population_spec(run, o.spec, o.size, o.population_seed);
    run.seed(o.seed);
    run.parameter("implicates", o.implicates);
    const auto pop = generate_population(spec);
    auto sample = draw_stratified_sample(pop, SamplingDesign::from_spec(spec), o.seed, o.variables);
    print_warnings(sample.warnings);

    MicrodataSet data = std::move(sample.data);
    if (o.implicates > 1) {
        run.parameter("impute_variable", o.impute_variable);
        run.parameter("missing", o.missing);
        data = synthesize_implicates(data, o.impute_variable, o.missing, o.implicates, derive_seed(o.seed, 0));
    }

    const auto csv = run.output(o.out, "sample.csv");
    write_microdata(data, csv);
    run.wrote(csv);
    const auto strata_csv = run.output(o.strata_out, "strata.csv");
    write_text_file(strata_csv, format_strata_csv(sample.strata));
    run.wrote(strata_csv);

    Json summary;
    summary["n"] = data.size();
    summary["implicates"] = data.implicate_count();
    summary["N"] = data.population_total(0);
    summary["strata"] = sample.strata.size();
    summary["warnings"] = sample.warnings;
    run.emit(summary);
}

void run_shares(Run& run, const SharesOptions& o) {
    run.input("data", o.input);
    const auto ks = fractiles_or_default(o.ks);
    run.parameter("variable", o.variable);
    run.parameter("k", ks);
    const auto data = load_microdata(o.input);
    const auto estimates = estimate_shares(data, o.variable, ks, o.dataset);

    Json result = Json::array();
    for (const auto& e : estimates) result.push_back(to_json(e));
    const auto path = run.output(o.out, "shares.json");
    write_text_file(path, result.dump(2) + "\n");
    run.wrote(path);
    run.emit(result);
}

void run_bootstrap_cmd(Run& run, const BootstrapCmdOptions& o) {
    run.input("data", o.input);
    run.seed(o.seed);
    const auto ks = fractiles_or_default(o.ks);
    run.parameter("variable", o.variable);
    run.parameter("k", ks);
    run.parameter("L", o.replicates);
    run.parameter("level", o.level);
    run.parameter("percentile", o.percentile);

    CsvSchema schema;
    schema.require_stratum = !o.strata.empty();
    const auto data = load_microdata(o.input, schema);

    Json report;
    ReplicateDesign design;
    if (!o.strata.empty()) {
        run.input("strata", o.strata);
        run.parameter("clusters", o.clusters);
        const auto strata = parse_strata_csv(read_text_file(o.strata));
        ClusterAssignment assignment;
        if (o.clusters == "auto") {
            assignment = select_cluster_count(strata);
        } else {
            int j = 0;
            try {
                j = std::stoi(o.clusters);
            } catch (const std::exception&) {
                throw ValidationError("--clusters must be a positive integer or 'auto', got '" + o.clusters + "'");
            }
            assignment = pam_cluster(strata, j);
        }
        print_warnings(assignment.warnings);
        design = ReplicateDesign::from_assignment(data, assignment);
        report["clustering"] = to_json(assignment);
    } else {
        design = ReplicateDesign::by_stratum(data);
        report["clustering"] = nullptr;
    }

    if (!o.replicates_out.empty()) {
        write_replicates(make_replicates(design, o.replicates, o.seed, run.common().threads), o.replicates_out);
        run.wrote(o.replicates_out);
    }

    BootstrapOptions options;
    options.variable = o.variable;
    options.ks = ks;
    options.replicates = o.replicates;
    options.seed = o.seed;
    options.threads = run.common().threads;
    options.level = o.level;
    options.percentile_interval = o.percentile;
    const auto result = run_bootstrap(data, design, options);
    print_warnings(result.warnings);

    Json estimates = Json::array();
    for (std::size_t q = 0; q < result.estimates.size(); ++q) {
        auto e = result.estimates[q];
        e.dataset = o.dataset;
        estimates.push_back(to_json(e, result.intervals[q], o.level));
    }
    report["estimates"] = estimates;
    report["replicate_clusters"] = design.cluster_count();
    report["warnings"] = result.warnings;

    const auto path = run.output(o.out, "bootstrap.json");
    write_text_file(path, report.dump(2) + "\n");
    run.wrote(path);
    run.emit(report);
}

void run_capitalize(Run& run, const CapitalizeOptions& o) {
    run.input("data", o.input);
    run.input("spec", o.spec);
    const auto spec = capitalization_spec_from_json(read_json_file(o.spec));
    run.parameter("capitalization_spec", to_json(spec));
    const auto data = load_microdata(o.input);

    std::vector<RateSolution> solutions;
    const auto augmented = capitalize_dataset(data, spec, o.column, &solutions);
    const auto csv = run.output(o.out, "capitalized.csv");
    write_microdata(augmented, csv);
    run.wrote(csv);

    Json rates = Json::array();
    for (std::size_t m = 0; m < solutions.size(); ++m) {
        auto r = to_json(solutions[m]);
        r["implicate"] = m + 1;
        if (!solutions[m].converged) {
            std::cerr << "warning: implicate " << m + 1 << ": top-group membership did not converge in "
                      << spec.max_iterations << " iterations\n";
        }
        rates.push_back(std::move(r));
    }
    const auto path = run.output(o.rates_out, "rates.json");
    write_text_file(path, rates.dump(2) + "\n");
    run.wrote(path);
    run.emit(rates);
}

void run_trend(Run& run, const TrendOptions& o) {
    run.input("series", o.input);
    run.parameter("x", o.x);
    run.parameter("y", o.y);
    run.parameter("se", o.se);
    run.parameter("ols", o.ols);
    const auto table = parse_numeric_table(read_text_file(o.input));
    const auto& x = table.column(o.x);
    const auto& y = table.column(o.y);
    const bool weighted = !o.se.empty() && !o.ols;
    const auto fit = weighted ? wls_fit(y, x, table.column(o.se)) : ols_fit(y, x);

    Json report = to_json(fit);
    report["method"] = weighted ? "wls" : "ols";
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    try {
        report["percent_change"] = {{"from", *lo}, {"to", *hi}, {"value", trend_percent_change(fit, *lo, *hi)}};
    } catch (const NumericalError&) {
        report["percent_change"] = nullptr;
    }

    const auto path = run.output(o.out, "trend.json");
    write_text_file(path, report.dump(2) + "\n");
    run.wrote(path);
    if (!o.band_out.empty()) {
        std::vector<double> xs(x.begin(), x.end());
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        write_text_file(o.band_out, format_trend_csv(trend_band(fit, xs, o.level)));
        run.wrote(o.band_out);
    }
    run.emit(report);
}

void run_simulate(Run& run, const SimulateOptions& o) {
    run.input("experiment", o.calib);
    run.seed(o.seed);
    auto spec = experiment_spec_from_json(read_json_file(o.calib));
    if (o.draws) spec.calibration.draws = *o.draws;
    if (!o.sigma_high.empty()) spec.calibration.sigma_high_set = o.sigma_high;
    spec.calibration.validate();
    run.parameter("experiment", to_json(spec));

    if (o.calibrate_target) {
        const double sigma = spec.calibration.sigma_high_set.front();
        const double dmu = calibrate_shock(spec.calibration.eta_hat, sigma, spec.experiment, *o.calibrate_target);
        auto ex = spec.experiment;
        ex.delta_mu = dmu;
        const auto path = run_shock(spec.calibration.eta_hat, sigma, ex);
        Json result;
        result["delta_mu"] = dmu;
        result["eta"] = spec.calibration.eta_hat;
        result["sigma_high"] = sigma;
        result["mu_high"] = path.mu_high;
        result["initial_share"] = path.shares.front();
        result["final_share"] = path.shares.back();
        run.parameter("calibrate_shock", *o.calibrate_target);
        run.emit(result);
        return;
    }

    const auto env = mc_envelope(spec.calibration, spec.experiment, o.seed, run.common().threads);
    const auto csv = run.output(o.out, "envelope.csv");
    write_text_file(csv, format_envelope_csv(env));
    run.wrote(csv);

    Json summary;
    summary["label"] = env.label;
    Json bands = Json::array();
    for (const auto& b : env.bands) {
        print_warnings(b.exclusions);
        bands.push_back({{"sigma_high", b.sigma_high},
                         {"year", b.years.back()},
                         {"median", b.median.back()},
                         {"lo95", b.lower.back()},
                         {"hi95", b.upper.back()},
                         {"excluded", b.excluded}});
    }
    summary["final_year"] = bands;
    run.emit(summary);
}

}  // namespace ineq::cli
