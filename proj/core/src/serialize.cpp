#include "ineq/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "csv_fields.hpp"
#include "ineq/errors.hpp"

namespace ineq {

using namespace detail;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json read_json_file(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path.string() + ": invalid JSON: " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

namespace {

void require_object(const Json& j, std::string_view context) {
    if (!j.is_object()) throw ValidationError(std::string(context) + ": expected a JSON object");
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view context) {
    require_object(j, context);
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ValidationError(std::string(context) + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
void read_into(const Json& j, const char* key, T& out, std::string_view context) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->template get<T>();
    } catch (const Json::exception&) {
        throw ValidationError(std::string(context) + ": key '" + key + "' has the wrong type");
    }
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

// ---------------------------------------------------------------------------
// Population spec

Json to_json(const SyntheticPopulationSpec& spec) {
    Json j;
    j["population_size"] = spec.population_size;
    j["meanlog"] = spec.meanlog;
    j["sdlog"] = spec.sdlog;
    j["tail_exponent"] = spec.tail_exponent;
    j["tail_mix_weight"] = spec.tail_mix_weight;
    j["tail_scale"] = spec.tail_scale;
    Json strata = Json::array();
    for (const auto& b : spec.strata_design) {
        strata.push_back({{"lower", b.lower},
                          {"upper", finite_or_null(b.upper)},
                          {"special_forms_prob", b.special_forms_prob},
                          {"usefulness_probs", b.usefulness_probs},
                          {"sampling_rate", b.sampling_rate}});
    }
    j["strata_design"] = strata;
    Json assets = Json::array();
    for (const auto& a : spec.assets) {
        assets.push_back({{"name", a.name},
                          {"portfolio_share", a.portfolio_share},
                          {"true_rate", a.true_rate},
                          {"top_rate", optional_number(a.top_rate)},
                          {"top_fraction", a.top_fraction}});
    }
    j["assets"] = assets;
    j["wealth_income_ratio"] = spec.wealth_income_ratio;
    j["wealth_noise_sdlog"] = spec.wealth_noise_sdlog;
    j["portfolio_noise_sdlog"] = spec.portfolio_noise_sdlog;
    j["seed"] = spec.seed;
    return j;
}

SyntheticPopulationSpec population_spec_from_json(const Json& j) {
    constexpr std::string_view ctx = "population spec";
    check_keys(j,
               {"population_size", "meanlog", "sdlog", "tail_exponent", "tail_mix_weight", "tail_scale",
                "strata_design", "assets", "wealth_income_ratio", "wealth_noise_sdlog", "portfolio_noise_sdlog",
                "seed"},
               ctx);
    auto spec = default_population_spec();
    read_into(j, "population_size", spec.population_size, ctx);
    read_into(j, "meanlog", spec.meanlog, ctx);
    read_into(j, "sdlog", spec.sdlog, ctx);
    read_into(j, "tail_exponent", spec.tail_exponent, ctx);
    read_into(j, "tail_mix_weight", spec.tail_mix_weight, ctx);
    read_into(j, "tail_scale", spec.tail_scale, ctx);
    read_into(j, "wealth_income_ratio", spec.wealth_income_ratio, ctx);
    read_into(j, "wealth_noise_sdlog", spec.wealth_noise_sdlog, ctx);
    read_into(j, "portfolio_noise_sdlog", spec.portfolio_noise_sdlog, ctx);
    read_into(j, "seed", spec.seed, ctx);

    if (j.contains("strata_design")) {
        spec.strata_design.clear();
        for (const auto& b : j.at("strata_design")) {
            constexpr std::string_view bctx = "population spec strata_design entry";
            check_keys(b, {"lower", "upper", "special_forms_prob", "usefulness_probs", "sampling_rate"}, bctx);
            StratumBracket br;
            read_into(b, "lower", br.lower, bctx);
            if (b.contains("upper") && b.at("upper").is_null()) {
                br.upper = std::numeric_limits<double>::infinity();
            } else {
                read_into(b, "upper", br.upper, bctx);
            }
            read_into(b, "special_forms_prob", br.special_forms_prob, bctx);
            read_into(b, "usefulness_probs", br.usefulness_probs, bctx);
            read_into(b, "sampling_rate", br.sampling_rate, bctx);
            spec.strata_design.push_back(std::move(br));
        }
    }
    if (j.contains("assets")) {
        spec.assets.clear();
        for (const auto& a : j.at("assets")) {
            constexpr std::string_view actx = "population spec assets entry";
            check_keys(a, {"name", "portfolio_share", "true_rate", "top_rate", "top_fraction"}, actx);
            AssetCategorySpec as;
            read_into(a, "name", as.name, actx);
            read_into(a, "portfolio_share", as.portfolio_share, actx);
            read_into(a, "true_rate", as.true_rate, actx);
            if (a.contains("top_rate") && !a.at("top_rate").is_null()) {
                double r = 0.0;
                read_into(a, "top_rate", r, actx);
                as.top_rate = r;
            }
            read_into(a, "top_fraction", as.top_fraction, actx);
            spec.assets.push_back(std::move(as));
        }
    }
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// Capitalization spec

Json to_json(const CapitalizationSpec& spec) {
    Json j;
    j["categories"] = spec.categories;
    Json fa = Json::object();
    for (const auto& c : spec.categories) {
        const auto it = spec.fa_totals.find(c);
        if (it != spec.fa_totals.end()) fa[c] = it->second;
    }
    j["fa_totals"] = fa;
    j["regime"] = spec.regime == RateRegime::Homogeneous ? "homogeneous" : "heterogeneous";
    Json het = Json::array();
    for (const auto& h : spec.heterogeneous) {
        het.push_back({{"category", h.category}, {"top_fraction", h.top_fraction}, {"top_rate", h.top_rate}});
    }
    j["heterogeneous"] = het;
    const char* kind = spec.nonfin.kind == NonfinancialRule::Kind::None     ? "none"
                       : spec.nonfin.kind == NonfinancialRule::Kind::Column ? "column"
                                                                              : "constant";
    j["nonfinancial"] = {{"kind", kind}, {"column", spec.nonfin.column}, {"constant", spec.nonfin.constant}};
    j["income_prefix"] = spec.income_prefix;
    j["max_iterations"] = spec.max_iterations;
    return j;
}

CapitalizationSpec capitalization_spec_from_json(const Json& j) {
    constexpr std::string_view ctx = "capitalization spec";
    check_keys(j, {"categories", "fa_totals", "regime", "heterogeneous", "nonfinancial", "income_prefix", "max_iterations"},
               ctx);
    CapitalizationSpec spec;
    read_into(j, "categories", spec.categories, ctx);
    read_into(j, "fa_totals", spec.fa_totals, ctx);
    std::string regime = "homogeneous";
    read_into(j, "regime", regime, ctx);
    if (regime == "homogeneous") {
        spec.regime = RateRegime::Homogeneous;
    } else if (regime == "heterogeneous") {
        spec.regime = RateRegime::Heterogeneous;
    } else {
        throw ValidationError("capitalization spec: regime must be homogeneous or heterogeneous, got '" + regime + "'");
    }
    if (j.contains("heterogeneous")) {
        for (const auto& h : j.at("heterogeneous")) {
            constexpr std::string_view hctx = "capitalization spec heterogeneous entry";
            check_keys(h, {"category", "top_fraction", "top_rate"}, hctx);
            HeterogeneousRule rule;
            read_into(h, "category", rule.category, hctx);
            read_into(h, "top_fraction", rule.top_fraction, hctx);
            read_into(h, "top_rate", rule.top_rate, hctx);
            spec.heterogeneous.push_back(std::move(rule));
        }
    }
    if (j.contains("nonfinancial")) {
        const auto& n = j.at("nonfinancial");
        constexpr std::string_view nctx = "capitalization spec nonfinancial";
        check_keys(n, {"kind", "column", "constant"}, nctx);
        std::string kind = "none";
        read_into(n, "kind", kind, nctx);
        if (kind == "none") {
            spec.nonfin.kind = NonfinancialRule::Kind::None;
        } else if (kind == "column") {
            spec.nonfin.kind = NonfinancialRule::Kind::Column;
        } else if (kind == "constant") {
            spec.nonfin.kind = NonfinancialRule::Kind::Constant;
        } else {
            throw ValidationError("capitalization spec: nonfinancial kind must be none, column or constant");
        }
        read_into(n, "column", spec.nonfin.column, nctx);
        read_into(n, "constant", spec.nonfin.constant, nctx);
    }
    read_into(j, "income_prefix", spec.income_prefix, ctx);
    read_into(j, "max_iterations", spec.max_iterations, ctx);
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// Experiment spec

Json to_json(const ExperimentSpec& spec) {
    const auto& c = spec.calibration;
    const auto& e = spec.experiment;
    Json j;
    j["calibration"] = {{"label", c.label},
                        {"eta_hat", c.eta_hat},
                        {"se", c.se},
                        {"draws", c.draws},
                        {"sigma_high", c.sigma_high_set},
                        {"draw_law", to_string(c.law)}};
    j["shock"] = {{"start_year", e.start_year},
                  {"end_year", e.end_year},
                  {"delta_mu", e.delta_mu},
                  {"top_fraction", e.top_fraction}};
    j["grid"] = {{"lo", e.grid.lo}, {"hi", e.grid.hi}, {"points", e.grid.points}};
    j["dt"] = e.dt;
    j["exit_rate"] = to_string(e.convention);
    j["model"] = {{"mu_low", e.defaults.mu_low},
                  {"sigma_low", e.defaults.sigma_low},
                  {"alpha", e.defaults.alpha},
                  {"delta", e.defaults.delta},
                  {"entry_high_prob", e.defaults.entry_high_prob},
                  {"entry_mean", e.defaults.entry_mean},
                  {"entry_sd", e.defaults.entry_sd}};
    return j;
}

ExperimentSpec experiment_spec_from_json(const Json& j) {
    constexpr std::string_view ctx = "experiment spec";
    check_keys(j, {"calibration", "shock", "grid", "dt", "exit_rate", "model"}, ctx);
    ExperimentSpec spec;
    auto& c = spec.calibration;
    auto& e = spec.experiment;
    if (!j.contains("calibration")) throw ValidationError("experiment spec: missing 'calibration'");
    {
        const auto& cj = j.at("calibration");
        constexpr std::string_view cctx = "experiment spec calibration";
        check_keys(cj, {"label", "eta_hat", "se", "draws", "sigma_high", "draw_law"}, cctx);
        if (!cj.contains("eta_hat") || !cj.contains("se")) {
            throw ValidationError("experiment spec calibration: 'eta_hat' and 'se' are required");
        }
        read_into(cj, "label", c.label, cctx);
        read_into(cj, "eta_hat", c.eta_hat, cctx);
        read_into(cj, "se", c.se, cctx);
        read_into(cj, "draws", c.draws, cctx);
        read_into(cj, "sigma_high", c.sigma_high_set, cctx);
        std::string law = "uniform";
        read_into(cj, "draw_law", law, cctx);
        c.law = parse_draw_law(law);
    }
    if (j.contains("shock")) {
        const auto& sj = j.at("shock");
        constexpr std::string_view sctx = "experiment spec shock";
        check_keys(sj, {"start_year", "end_year", "delta_mu", "top_fraction"}, sctx);
        read_into(sj, "start_year", e.start_year, sctx);
        read_into(sj, "end_year", e.end_year, sctx);
        read_into(sj, "delta_mu", e.delta_mu, sctx);
        read_into(sj, "top_fraction", e.top_fraction, sctx);
    }
    if (j.contains("grid")) {
        const auto& gj = j.at("grid");
        constexpr std::string_view gctx = "experiment spec grid";
        check_keys(gj, {"lo", "hi", "points"}, gctx);
        read_into(gj, "lo", e.grid.lo, gctx);
        read_into(gj, "hi", e.grid.hi, gctx);
        read_into(gj, "points", e.grid.points, gctx);
    }
    read_into(j, "dt", e.dt, ctx);
    std::string exit = "combined";
    read_into(j, "exit_rate", exit, ctx);
    e.convention = parse_exit_rate(exit);
    if (j.contains("model")) {
        const auto& mj = j.at("model");
        constexpr std::string_view mctx = "experiment spec model";
        check_keys(mj, {"mu_low", "sigma_low", "alpha", "delta", "entry_high_prob", "entry_mean", "entry_sd"}, mctx);
        read_into(mj, "mu_low", e.defaults.mu_low, mctx);
        read_into(mj, "sigma_low", e.defaults.sigma_low, mctx);
        read_into(mj, "alpha", e.defaults.alpha, mctx);
        read_into(mj, "delta", e.defaults.delta, mctx);
        read_into(mj, "entry_high_prob", e.defaults.entry_high_prob, mctx);
        read_into(mj, "entry_mean", e.defaults.entry_mean, mctx);
        read_into(mj, "entry_sd", e.defaults.entry_sd, mctx);
    }
    c.validate();
    e.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// Results

Json to_json(const ShareEstimate& e) {
    Json j;
    j["variable"] = e.variable;
    j["k"] = e.k;
    j["point"] = e.point;
    j["per_implicate"] = e.per_implicate;
    j["sigma1"] = optional_number(e.sigma1);
    j["sigma2"] = optional_number(e.sigma2);
    j["sigma"] = optional_number(e.sigma);
    j["n"] = e.n;
    j["N"] = e.N;
    if (e.replicates > 0) j["replicates"] = e.replicates;
    if (!e.dataset.empty()) j["dataset"] = e.dataset;
    return j;
}

Json to_json(const ShareEstimate& e, const Interval& ci, double level) {
    Json j = to_json(e);
    j["level"] = level;
    j["ci"] = {ci.lo, ci.hi};
    return j;
}

Json to_json(const ClusterAssignment& a) {
    Json j;
    j["cluster_count"] = a.cluster_count;
    Json curve = Json::array();
    for (const auto& [count, width] : a.silhouette_by_j) curve.push_back({{"clusters", count}, {"mean_silhouette", width}});
    j["silhouette"] = curve;
    j["medoids"] = a.medoids;
    j["cluster_sizes"] = a.cluster_sizes;
    j["total_cost"] = a.total_cost;
    Json assignment = Json::array();
    for (const auto& [stratum, cluster] : a.cluster_of) assignment.push_back({{"stratum", stratum}, {"cluster", cluster}});
    j["assignment"] = assignment;
    j["warnings"] = a.warnings;
    return j;
}

Json to_json(const RateSolution& r) {
    Json j;
    Json rates = Json::object();
    for (const auto& [category, rate] : r.rates) {
        Json c;
        c["rate"] = rate.rate;
        c["top_rate"] = optional_number(rate.top_rate);
        c["bottom_rate"] = optional_number(rate.bottom_rate);
        rates[category] = c;
    }
    j["rates"] = rates;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    return j;
}

Json to_json(const RegressionResult& r) {
    Json j;
    j["intercept"] = r.intercept;
    j["slope"] = r.slope;
    j["se_intercept"] = r.se_intercept;
    j["se_slope"] = r.se_slope;
    j["t_intercept"] = finite_or_null(r.t_intercept);
    j["t_slope"] = finite_or_null(r.t_slope);
    j["r_squared"] = r.r_squared;
    j["residual_variance"] = r.residual_variance;
    j["n"] = r.n;
    j["dof"] = r.dof;
    j["weights"] = r.weights;
    return j;
}

// ---------------------------------------------------------------------------
// Tables

namespace {

struct Lines {
    std::vector<std::pair<std::size_t, std::string_view>> rows;  // (line number, text)
    std::vector<std::string_view> header;
};

Lines split_table(std::string_view text, std::string_view what) {
    Lines out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(pos, end - pos));
        ++line_no;
        pos = end + 1;
        if (line.empty() || line.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        if (!have_header) {
            out.header = split_fields(line);
            have_header = true;
        } else {
            out.rows.emplace_back(line_no, line);
        }
        if (end == text.size()) break;
    }
    if (!have_header) throw ValidationError(std::string(what) + ": empty input");
    return out;
}

}  // namespace

std::vector<StratumProfile> parse_strata_csv(std::string_view text) {
    const auto lines = split_table(text, "strata CSV");
    const std::vector<std::string_view> expected{"stratum_id", "size", "income_bracket_rank", "special_forms_flag",
                                                 "usefulness_code"};
    std::vector<std::size_t> col(expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
        const auto it = std::find(lines.header.begin(), lines.header.end(), expected[k]);
        if (it == lines.header.end()) {
            throw ValidationError("strata CSV header lacks column '" + std::string(expected[k]) + "'");
        }
        col[k] = static_cast<std::size_t>(it - lines.header.begin());
    }
    std::vector<StratumProfile> out;
    std::set<int> seen;
    std::size_t row = 0;
    for (const auto& [line_no, line] : lines.rows) {
        ++row;
        const auto f = split_fields(line);
        if (f.size() != lines.header.size()) {
            throw ValidationError("strata CSV: " + row_context(row, line_no) + " has " + std::to_string(f.size()) +
                                  " fields, expected " + std::to_string(lines.header.size()));
        }
        StratumProfile p;
        p.stratum_id = static_cast<int>(parse_int(f[col[0]], expected[0], row, line_no));
        const auto size = parse_int(f[col[1]], expected[1], row, line_no);
        if (size < 0) throw ValidationError("strata CSV: negative size at " + row_context(row, line_no));
        p.size = static_cast<std::size_t>(size);
        p.income_bracket_rank = static_cast<int>(parse_int(f[col[2]], expected[2], row, line_no));
        p.special_forms_flag = static_cast<int>(parse_int(f[col[3]], expected[3], row, line_no));
        p.usefulness_code = static_cast<int>(parse_int(f[col[4]], expected[4], row, line_no));
        if (p.income_bracket_rank < 1) {
            throw ValidationError("strata CSV: income_bracket_rank must be >= 1 at " + row_context(row, line_no));
        }
        if (!seen.insert(p.stratum_id).second) {
            throw ValidationError("strata CSV: duplicate stratum_id " + std::to_string(p.stratum_id));
        }
        out.push_back(p);
    }
    return out;
}

std::string format_strata_csv(std::span<const StratumProfile> strata) {
    std::ostringstream out;
    out << "stratum_id,size,income_bracket_rank,special_forms_flag,usefulness_code\n";
    for (const auto& s : strata) {
        out << s.stratum_id << ',' << s.size << ',' << s.income_bracket_rank << ',' << s.special_forms_flag << ','
            << s.usefulness_code << '\n';
    }
    return out.str();
}

const std::vector<double>& NumericTable::column(std::string_view name) const {
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c] == name) return columns[c];
    }
    throw ValidationError("table has no column '" + std::string(name) + "'");
}

bool NumericTable::has(std::string_view name) const noexcept {
    return std::find(names.begin(), names.end(), name) != names.end();
}

NumericTable parse_numeric_table(std::string_view text) {
    const auto lines = split_table(text, "CSV table");
    NumericTable t;
    for (auto h : lines.header) t.names.emplace_back(h);
    t.columns.resize(t.names.size());
    std::size_t row = 0;
    for (const auto& [line_no, line] : lines.rows) {
        ++row;
        const auto f = split_fields(line);
        if (f.size() != t.names.size()) {
            throw ValidationError("CSV table: " + row_context(row, line_no) + " has " + std::to_string(f.size()) +
                                  " fields, expected " + std::to_string(t.names.size()));
        }
        for (std::size_t c = 0; c < f.size(); ++c) t.columns[c].push_back(parse_double(f[c], t.names[c], row, line_no));
    }
    return t;
}

std::string format_trend_csv(std::span<const TrendPoint> band) {
    std::ostringstream out;
    out << "year,fitted,lower95,upper95\n";
    for (const auto& p : band) {
        out << format_number(p.x) << ',' << format_number(p.fitted) << ',' << format_number(p.lower) << ','
            << format_number(p.upper) << '\n';
    }
    return out.str();
}

std::string format_envelope_csv(const Envelope& envelope) {
    std::ostringstream out;
    out << "year,sigmaH,median,lo95,hi95\n";
    for (const auto& b : envelope.bands) {
        for (std::size_t t = 0; t < b.years.size(); ++t) {
            out << format_number(b.years[t]) << ',' << format_number(b.sigma_high) << ','
                << format_number(b.median[t]) << ',' << format_number(b.lower[t]) << ','
                << format_number(b.upper[t]) << '\n';
        }
    }
    return out.str();
}

}  // namespace ineq
