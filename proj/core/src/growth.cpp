#include "ineq/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ineq/errors.hpp"
#include "ineq/numeric.hpp"

namespace ineq {

ExitRate parse_exit_rate(const std::string& name) {
    if (name == "combined") return ExitRate::Combined;
    if (name == "netted") return ExitRate::Netted;
    throw ValidationError("unknown exit-rate convention '" + name + "' (expected combined or netted)");
}

std::string to_string(ExitRate e) { return e == ExitRate::Combined ? "combined" : "netted"; }

void GrowthModelParams::validate() const {
    if (!(sigma_high > 0.0) || !(sigma_low > 0.0)) throw ValidationError("volatilities must be positive");
    if (!(alpha >= 0.0)) throw ValidationError("switching rate alpha must be nonnegative");
    if (!(delta > 0.0)) throw ValidationError("retirement rate delta must be positive");
    if (!(entry_high_prob >= 0.0 && entry_high_prob <= 1.0)) {
        throw ValidationError("entry probability of the high type must lie in [0, 1]");
    }
    if (!(entry_sd > 0.0)) throw ValidationError("entry distribution needs a positive spread");
    for (double v : {mu_high, mu_low, entry_mean}) {
        if (!std::isfinite(v)) throw ValidationError("nonfinite growth-model parameter");
    }
}

GrowthModelParams ModelDefaults::make(double mu_high, double sigma_high) const {
    GrowthModelParams p;
    p.mu_high = mu_high;
    p.sigma_high = sigma_high;
    p.mu_low = mu_low;
    p.sigma_low = sigma_low > 0.0 ? sigma_low : sigma_high;
    p.alpha = alpha;
    p.delta = delta;
    p.entry_high_prob = entry_high_prob;
    p.entry_mean = entry_mean;
    p.entry_sd = entry_sd;
    return p;
}

void Grid::validate() const {
    if (points < 3) throw ValidationError("grid needs at least 3 points");
    if (!(hi > lo)) throw ValidationError("grid upper bound must exceed lower bound");
}

double DensityState::mass() const noexcept {
    CompensatedSum s;
    for (std::size_t i = 0; i < high.size(); ++i) s += high[i] + low[i];
    return grid.step() * s.value();
}

std::vector<double> DensityState::total() const {
    std::vector<double> f(high.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = high[i] + low[i];
    return f;
}

double eta_from_shares(double p_tenth_k, double p_k) {
    if (!(p_k > 0.0) || !(p_tenth_k > 0.0)) throw ValidationError("top shares must be positive");
    if (p_tenth_k > p_k) throw ValidationError("the finer top share cannot exceed the coarser one");
    return 1.0 + std::log10(p_tenth_k / p_k);
}

namespace {

double exit_rate(double alpha, double delta, ExitRate convention) {
    return convention == ExitRate::Combined ? delta + alpha : delta - alpha;
}

}  // namespace

double xi_from_mu_high(double mu, double sigma, double alpha, double delta, ExitRate convention) {
    if (!(sigma > 0.0)) throw ValidationError("sigma_high must be positive");
    const double s2 = sigma * sigma;
    const double e = exit_rate(alpha, delta, convention);
    const double disc = mu * mu + 2.0 * s2 * e;
    if (disc < 0.0) {
        const double bound = std::sqrt(-2.0 * s2 * e);
        std::ostringstream msg;
        msg << "no Pareto steady state: discriminant " << disc << " < 0 for mu_high = " << mu
            << " under the " << to_string(convention) << " exit rate; a positive exponent needs mu_high <= "
            << -bound;
        throw NumericalError(msg.str());
    }
    const double xi = (-mu + std::sqrt(disc)) / s2;
    if (!(xi > 0.0)) {
        std::ostringstream msg;
        msg << "no Pareto steady state: exponent " << xi << " is not positive for mu_high = " << mu;
        throw NumericalError(msg.str());
    }
    return xi;
}

double mu_high_from_eta(double eta, double sigma, double alpha, double delta, ExitRate convention) {
    if (!(eta > 0.0)) throw ValidationError("eta must be positive");
    if (!(sigma > 0.0)) throw ValidationError("sigma_high must be positive");
    const double xi = 1.0 / eta;
    const double e = exit_rate(alpha, delta, convention);
    const double mu = e / xi - xi * sigma * sigma / 2.0;
    double back = 0.0;
    try {
        back = xi_from_mu_high(mu, sigma, alpha, delta, convention);
    } catch (const NumericalError&) {
        back = -1.0;
    }
    if (!(std::abs(back - xi) <= 1e-10 * std::max(1.0, xi))) {
        std::ostringstream msg;
        msg << "calibration infeasible: eta = " << eta << " (xi = " << xi << ") is not reachable under the "
            << to_string(convention) << " exit rate";
        if (e < 0.0) msg << "; the smallest attainable xi is " << std::sqrt(-2.0 * e) / sigma;
        throw NumericalError(msg.str());
    }
    return mu;
}

namespace {

/// Tridiagonal system a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i, factored
/// once (Thomas algorithm) and solved for many right-hand sides.
class TridiagonalSolver {
public:
    TridiagonalSolver(std::vector<double> a, std::vector<double> b, std::vector<double> c)
        : a_(std::move(a)), cp_(std::move(c)), inv_(b.size()) {
        const std::size_t n = b.size();
        inv_[0] = 1.0 / b[0];
        cp_[0] *= inv_[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double denom = b[i] - a_[i] * cp_[i - 1];
            if (!(std::abs(denom) > 0.0)) throw NumericalError("singular tridiagonal system");
            inv_[i] = 1.0 / denom;
            cp_[i] *= inv_[i];
        }
    }

    void solve(std::vector<double>& d) const {
        const std::size_t n = d.size();
        d[0] *= inv_[0];
        for (std::size_t i = 1; i < n; ++i) d[i] = (d[i] - a_[i] * d[i - 1]) * inv_[i];
        for (std::size_t i = n - 1; i-- > 0;) d[i] -= cp_[i] * d[i + 1];
    }

private:
    std::vector<double> a_;
    std::vector<double> cp_;
    std::vector<double> inv_;
};

/// Finite-volume generator of drift mu, diffusion sigma^2/2 and exit rate
/// lambda: central fluxes, zero flux through the lower face, zero density
/// beyond the upper face. Returns the tridiagonal of (shift I - scale * A).
TridiagonalSolver shifted_generator(double mu, double sigma, double lambda, const Grid& grid, double shift,
                                    double scale) {
    const std::size_t n = grid.points;
    const double h = grid.step();
    const double D = 0.5 * sigma * sigma;
    const double adv = mu / (2.0 * h);
    const double dif = D / (h * h);
    if (std::abs(mu) * h > sigma * sigma) {
        throw ValidationError("grid too coarse for the drift: |mu| h must not exceed sigma^2");
    }
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sub = adv + dif;
        double sup = -adv + dif;
        double diag = -2.0 * dif - lambda;
        if (i == 0) {
            sub = 0.0;
            diag = -adv - dif - lambda;
        }
        if (i == n - 1) sup = 0.0;
        a[i] = -scale * sub;
        b[i] = shift - scale * diag;
        c[i] = -scale * sup;
    }
    return TridiagonalSolver(std::move(a), std::move(b), std::move(c));
}

std::vector<double> entry_density(const GrowthModelParams& p, const Grid& grid) {
    std::vector<double> psi(grid.points);
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double z = (grid.x(i) - p.entry_mean) / p.entry_sd;
        psi[i] = std::exp(-0.5 * z * z);
    }
    const double m = grid.step() * compensated_sum(psi);
    if (!(m > 0.0)) throw ValidationError("entry distribution has no mass on the grid");
    for (auto& v : psi) v /= m;
    return psi;
}

void check_upper_truncation(const DensityState& s) {
    const std::size_t n = s.high.size();
    const std::size_t band = std::max<std::size_t>(2, n / 20);
    CompensatedSum top;
    for (std::size_t i = n - band; i < n; ++i) top += s.high[i] + s.low[i];
    const double share = s.grid.step() * top.value() / s.mass();
    if (share > 1e-8) {
        std::ostringstream msg;
        msg << "grid too narrow: " << share << " of the mass lies within the top 5% of the grid (limit 1e-8); "
            << "raise the upper bound " << s.grid.hi;
        throw NumericalError(msg.str());
    }
}

}  // namespace

DensityState steady_state(const GrowthModelParams& p, const Grid& grid) {
    p.validate();
    grid.validate();
    const auto psi = entry_density(p, grid);
    const std::size_t n = grid.points;

    DensityState s;
    s.grid = grid;
    s.high.resize(n);
    s.low.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.high[i] = p.entry_high_prob * p.delta * psi[i];
        s.low[i] = (1.0 - p.entry_high_prob) * p.delta * psi[i];
    }
    shifted_generator(p.mu_high, p.sigma_high, p.alpha + p.delta, grid, 0.0, 1.0).solve(s.high);
    for (std::size_t i = 0; i < n; ++i) s.low[i] += p.alpha * s.high[i];
    shifted_generator(p.mu_low, p.sigma_low, p.delta, grid, 0.0, 1.0).solve(s.low);

    for (std::size_t i = 0; i < n; ++i) {
        s.high[i] = std::max(s.high[i], 0.0);
        s.low[i] = std::max(s.low[i], 0.0);
    }
    check_upper_truncation(s);
    const double m = s.mass();
    if (!(m > 0.0)) throw NumericalError("stationary density has no mass");
    for (std::size_t i = 0; i < n; ++i) {
        s.high[i] /= m;
        s.low[i] /= m;
    }
    return s;
}

double tail_slope(const DensityState& state, double x_lo, double x_hi) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < state.grid.points; ++i) {
        const double x = state.grid.x(i);
        const double f = state.high[i] + state.low[i];
        if (x < x_lo || x > x_hi || !(f > 0.0)) continue;
        xs.push_back(x);
        ys.push_back(std::log(f));
    }
    if (xs.size() < 3) throw NumericalError("tail region holds fewer than 3 positive density points");
    const double n = static_cast<double>(xs.size());
    const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
    }
    return sxy / sxx;
}

double estimated_tail_exponent(const DensityState& state) {
    const auto f = state.total();
    const double h = state.grid.step();
    const double m = state.mass();
    if (!(m > 0.0)) return 0.0;
    double survival = 0.0;
    double x_lo = state.grid.hi, x_hi = state.grid.lo;
    std::size_t count = 0;
    // deep enough that entry mass no longer bends the slope, clear of the upper boundary cells
    const double x_cap = state.grid.hi - 0.05 * (state.grid.hi - state.grid.lo);
    for (std::size_t i = f.size(); i-- > 0;) {
        survival += h * f[i] / m;
        if (survival >= 1e-12 && survival <= 1e-8 && f[i] > 0.0 && state.grid.x(i) <= x_cap) {
            x_lo = std::min(x_lo, state.grid.x(i));
            x_hi = std::max(x_hi, state.grid.x(i));
            ++count;
        }
    }
    if (count < 3) return 0.0;
    return -tail_slope(state, x_lo, x_hi);
}

namespace {

double share_above(const DensityState& state, double q) {
    const std::size_t n = state.grid.points;
    const double h = state.grid.step();
    std::vector<double> f = state.total();
    std::vector<double> cell_mass(n - 1), cell_income(n - 1);
    CompensatedSum mass, income;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cell_mass[i] = 0.5 * h * (f[i] + f[i + 1]);
        cell_income[i] = 0.5 * h * (std::exp(state.grid.x(i)) * f[i] + std::exp(state.grid.x(i + 1)) * f[i + 1]);
        mass += cell_mass[i];
        income += cell_income[i];
    }
    const double total_mass = mass.value();
    const double total_income = income.value();
    if (!(total_mass > 0.0) || !(total_income > 0.0)) throw NumericalError("density has no mass or income");

    const double target = q * total_mass;
    CompensatedSum above_mass, above_income;
    for (std::size_t i = n - 1; i-- > 0;) {
        if (above_mass.value() + cell_mass[i] >= target) {
            const double frac = cell_mass[i] > 0.0 ? (target - above_mass.value()) / cell_mass[i] : 0.0;
            above_income += frac * cell_income[i];
            return above_income.value() / total_income;
        }
        above_mass += cell_mass[i];
        above_income += cell_income[i];
    }
    return above_income.value() / total_income;
}

}  // namespace

double top_share_from_density(const DensityState& state, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("top fraction q must lie in (0, 1)");
    const std::size_t n = state.grid.points;
    if (state.high.size() != n || state.low.size() != n) throw ValidationError("density does not match its grid");
    const double xi = estimated_tail_exponent(state);
    if (xi != 0.0 && xi <= 1.0) {
        std::ostringstream msg;
        msg << "divergent mean: estimated tail exponent " << xi << " <= 1";
        throw NumericalError(msg.str());
    }
    return share_above(state, q);
}

TransitionResult simulate_transition(const DensityState& initial,
                                     const GrowthModelParams& p,
                                     double horizon_years,
                                     double dt,
                                     std::span<const double> top_fractions,
                                     double start_time) {
    p.validate();
    if (!(dt > 0.0 && dt <= 0.1)) throw ValidationError("time step must lie in (0, 0.1] years");
    if (!(horizon_years >= 0.0)) throw ValidationError("horizon must be nonnegative");
    const double m0 = initial.mass();
    if (std::abs(m0 - 1.0) > 1e-6) throw ValidationError("initial density is not normalized");

    std::vector<double> qs(top_fractions.begin(), top_fractions.end());
    if (qs.empty()) qs.push_back(0.01);
    for (double q : qs) {
        if (!(q > 0.0 && q < 1.0)) throw ValidationError("top fraction q must lie in (0, 1)");
    }

    const auto steps_per_year = static_cast<std::size_t>(std::ceil(1.0 / dt - 1e-9));
    const double step = 1.0 / static_cast<double>(steps_per_year);
    const auto years = static_cast<std::size_t>(std::ceil(horizon_years - 1e-9));

    const auto& grid = initial.grid;
    const auto psi = entry_density(p, grid);
    const auto solve_high = shifted_generator(p.mu_high, p.sigma_high, p.alpha + p.delta, grid, 1.0, step);
    const auto solve_low = shifted_generator(p.mu_low, p.sigma_low, p.delta, grid, 1.0, step);

    TransitionResult out;
    out.shares.resize(qs.size());
    DensityState s = initial;
    auto checkpoint = [&] {
        out.times.push_back(start_time + (s.time - initial.time));
        for (std::size_t k = 0; k < qs.size(); ++k) out.shares[k].push_back(share_above(s, qs[k]));
        const double drift = std::abs(s.mass() - m0);
        out.max_mass_drift = std::max(out.max_mass_drift, drift);
        if (drift > 1e-6) {
            std::ostringstream msg;
            msg << "numerical failure: mass drifted by " << drift << " at t = " << s.time;
            throw NumericalError(msg.str());
        }
    };

    checkpoint();
    const std::size_t n = grid.points;
    const double src_high = step * p.entry_high_prob * p.delta;
    const double src_low = step * (1.0 - p.entry_high_prob) * p.delta;
    for (std::size_t y = 0; y < years; ++y) {
        for (std::size_t k = 0; k < steps_per_year; ++k) {
            for (std::size_t i = 0; i < n; ++i) s.high[i] += src_high * psi[i];
            solve_high.solve(s.high);
            for (std::size_t i = 0; i < n; ++i) s.low[i] += src_low * psi[i] + step * p.alpha * s.high[i];
            solve_low.solve(s.low);
        }
        s.time = initial.time + static_cast<double>(y + 1);
        checkpoint();
    }
    out.final_state = std::move(s);
    return out;
}

}  // namespace ineq
