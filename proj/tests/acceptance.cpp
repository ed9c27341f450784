// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--cli PATH] [--data DIR] [--work DIR] [--workers K] [criterion ...]
//
// With no criterion numbers every check runs. The chain experiments use
// dt = 2e-3 to keep the run within an hour on one core.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ionheat/ionheat.hpp"

using namespace ionheat;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string format(const char* f, auto... args) {
    char buf[1024];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Settings {
    std::string cli;
    fs::path data;
    fs::path work;
    unsigned workers = 1;
};

Settings settings;

RunOptions run_opts() {
    RunOptions o;
    o.workers = settings.workers;
    return o;
}

ExperimentConfig chain_config(std::size_t n, double alpha, double detuning_left, double detuning_right) {
    ExperimentConfig c;
    c.preset = "acceptance";
    c.chain.n_ions = n;
    c.chain.aspect_ratio = alpha;
    c.beams = default_beam_groups(n, detuning_left, detuning_right);
    c.batches = 1;
    return c;
}

// ---------------------------------------------------------------------------
// 1

Outcome force_gradient() {
    std::mt19937_64 rng(101);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    int states = 0;
    for (std::size_t n = 1; n <= 10; ++n) {
        for (int rep = 0; rep < 4; ++rep, ++states) {
            const double alpha = 2.0 + 12.0 * std::uniform_real_distribution<double>(0, 1)(rng);
            ChainState s(n);
            for (std::size_t i = 0; i < n; ++i) {
                s.q(Axis::x, i) = 1.2 * (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) + 0.2 * gauss(rng);
                s.q(Axis::y, i) = 0.3 * gauss(rng);
            }
            const auto f = forces(s, alpha);
            double err = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (Axis a : {Axis::x, Axis::y}) {
                    const double h = 1e-5, x0 = s.q(a, i);
                    s.q(a, i) = x0 + h;
                    const double up = potential_energy(s, alpha);
                    s.q(a, i) = x0 - h;
                    const double dn = potential_energy(s, alpha);
                    s.q(a, i) = x0;
                    const double fd = -(up - dn) / (2.0 * h);
                    const double an = f(a, i);
                    err = std::max(err, std::abs(fd - an));
                    scale = std::max(scale, std::abs(an));
                }
            worst = std::max(worst, err / scale);
        }
    }
    return {worst < 1e-6, format("%d random states, N = 1..10, max relative error %.2e (< 1e-6)", states, worst)};
}

// ---------------------------------------------------------------------------
// 2

Outcome energy_conservation() {
    const std::size_t n = 5;
    const double alpha = 9.0;
    auto s = initial_conditions(relax_linear_chain(n), 0.05, 77);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 0.3);
    for (std::size_t i = 0; i < n; ++i)
        for (Axis a : {Axis::x, Axis::y}) s.p(a, i) = gauss(rng);
    const LangevinModel model(alpha, BathMap(n));
    const double e0 = total_energy(s, alpha);
    double drift = 0.0;
    simulate_trajectory(s, model, {1e-4, 100.0, 100, 1}, [&](const ChainState& x, std::size_t) {
        drift = std::max(drift, std::abs(total_energy(x, alpha) - e0) / std::abs(e0));
    });
    return {drift < 1e-6, format("N = 5, dt = 1e-4, t = 100: max |E - E0| / |E0| = %.2e (< 1e-6)", drift)};
}

// ---------------------------------------------------------------------------
// 3
//
// A lone ion with alpha = 0 feels no transverse force, so its transverse
// momentum is an Ornstein-Uhlenbeck process with eta = D = 1. One integrator
// step maps p -> a p + c xi; a and c are read off the real stepper, which
// gives the exact stationary second moment c^2 / (1 - a^2) of the scheme.

struct OuProbe {
    double a = 0.0, c = 0.0;
    double linearity_error = 0.0;
    double stationary() const { return c * c / (1.0 - a * a); }
};

BathMap ou_bath() {
    BathMap b(1);
    b.add(0, Axis::x, 1.0, 1.0);
    b.add(0, Axis::y, 1.0, 1.0);
    return b;
}

OuProbe probe_ou(double dt) {
    const LangevinModel model(0.0, ou_bath());
    PlatenStepper stepper(model);
    auto run = [&](double p, double xi) {
        StateVector y{0.0, 0.0, 0.0, p};
        const std::vector<double> g{0.0, xi};
        stepper.step(y, dt, g);
        return y[3];
    };
    OuProbe pr;
    pr.a = run(1.0, 0.0);
    pr.c = run(0.0, 1.0);
    pr.linearity_error = std::max(std::abs(run(0.7, -1.3) - (0.7 * pr.a - 1.3 * pr.c)),
                                  std::abs(run(0.0, 0.0)));
    return pr;
}

struct OuSample {
    Estimate p2;
};

// Independent trajectories from p ~ N(0, 1), run to t = 2; E p^2 then equals
// the scheme's stationary value up to (1 - v) a^(2K), far below the error bar.
OuSample sample_ou(double dt, std::size_t samples, std::uint64_t seed) {
    const LangevinModel model(0.0, ou_bath());
    PlatenStepper stepper(model);
    const long long steps = std::llround(2.0 / dt);
    std::vector<double> values;
    values.reserve(samples);
    GaussianStream start(seed);
    std::vector<double> g(2);
    for (std::size_t k = 0; k < samples; ++k) {
        GaussianStream noise(derive_seed(seed, k));
        StateVector y{0.0, 0.0, start(), start()};
        for (long long s = 0; s < steps; ++s) {
            noise.fill(g);
            stepper.step(y, dt, g);
        }
        values.push_back(y[3] * y[3]);
    }
    return {mean_and_stderr(values)};
}

Outcome weak_order() {
    const double exact = 1.0;  // D / eta
    const auto coarse = probe_ou(2e-3), fine = probe_ou(1e-3);
    const double bc = coarse.stationary() - exact, bf = fine.stationary() - exact;
    const double ratio = bc / bf;
    // Closed form of the Heun recursion for the same OU process.
    auto heun = [](double dt) { return (2.0 - dt) / (2.0 - dt + 0.5 * dt * dt); };
    const double closed_gap = std::max(std::abs(coarse.stationary() - heun(2e-3)), std::abs(fine.stationary() - heun(1e-3)));
    const bool exact_ok = ratio >= 3.0 && ratio <= 5.0 && closed_gap < 1e-12
                          && std::max(coarse.linearity_error, fine.linearity_error) < 1e-14;

    const std::size_t samples = 100000;
    const auto mc_c = sample_ou(2e-3, samples, 31), mc_f = sample_ou(1e-3, samples, 32);
    const double zc = (mc_c.p2.mean - coarse.stationary()) / mc_c.p2.std_error;
    const double zf = (mc_f.p2.mean - fine.stationary()) / mc_f.p2.std_error;
    const bool mc_ok = std::abs(zc) < 3.0 && std::abs(zf) < 3.0;

    return {exact_ok && mc_ok,
            format("stationary <p^2> bias %.4e (dt 2e-3) / %.4e (dt 1e-3) = %.4f (in [3, 5]); "
                   "Monte Carlo with %zu samples per dt: %.4f +- %.4f and %.4f +- %.4f, z = %.2f, %.2f (< 3)",
                   bc, bf, ratio, samples, mc_c.p2.mean, mc_c.p2.std_error, mc_f.p2.mean, mc_f.p2.std_error, zc, zf)};
}

// ---------------------------------------------------------------------------
// 4

Outcome bath_equilibration() {
    ExperimentConfig c;
    c.preset = "acceptance";
    c.chain.n_ions = 1;
    c.chain.aspect_ratio = 13.0;
    BeamGroup g;
    g.ions = {1};
    g.intensity = 0.08;
    g.detuning = -0.02;
    c.beams = {g};
    c.schedule = {2e-3, 1100.0, 50, 2024};
    c.trajectories = 400;
    c.window = {100.0, 1100.0};
    const auto r = run_ensemble(c, run_opts());
    if (!r.statistics) return {false, "ensemble produced no statistics"};
    const auto params = c.params();

    const double target = r.baths.diffusion(0, Axis::x) / r.baths.eta(0, Axis::x);
    const auto units = statistical_units(r.summaries);
    const auto tx = estimate_over(units, [](const ObservableMeans& m) { return m.p2_of(0, Axis::x); });
    const auto ty = estimate_over(units, [](const ObservableMeans& m) { return m.p2_of(0, Axis::y); });
    const double dx = tx.mean / target - 1.0, dy = ty.mean / target - 1.0;

    // Closed-form Doppler limit from the SI constants.
    const double s = -0.02;
    const double gamma = two_pi * 41.296e6;
    const double kelvin_oracle = constants::hbar * gamma * (1.0 + 4.0 * s * s) / (8.0 * std::abs(s) * constants::boltzmann);
    const double kelvin_model = temperature_to_kelvin(params, target);
    const double kelvin_measured = temperature_to_kelvin(params, 0.5 * (tx.mean + ty.mean));
    const bool kelvin_ok = std::abs(kelvin_model / kelvin_oracle - 1.0) < 1e-9 && std::abs(kelvin_oracle - 12.4e-3) < 0.05e-3
                           && std::abs(kelvin_measured / kelvin_oracle - 1.0) < 0.05;

    return {std::abs(dx) < 0.05 && std::abs(dy) < 0.05 && kelvin_ok,
            format("%zu trajectories: T_x = %.5f +- %.5f (%+.2f%%), T_y = %.5f +- %.5f (%+.2f%%) vs D/eta = %.5f; "
                   "D/(k_B eta) = %.3f mK (oracle %.3f mK), measured %.3f mK",
                   units.size(), tx.mean, tx.std_error, 100 * dx, ty.mean, ty.std_error, 100 * dy, target,
                   1e3 * kelvin_model, 1e3 * kelvin_oracle, 1e3 * kelvin_measured)};
}

// ---------------------------------------------------------------------------
// 5

Outcome statics_oracles() {
    const auto two = relax_equilibrium(2, 20.0);
    const auto three = relax_equilibrium(3, 20.0);
    const double e2 = std::abs(two.positions[1][0] - two.positions[0][0] - std::cbrt(2.0));
    const double e3 = std::abs(three.positions[2][0] - std::cbrt(1.25));
    std::vector<double> alphas;
    for (double a = 14.0; a >= 6.0 - 1e-9; a -= 0.25) alphas.push_back(a);
    const auto rep = preset_statics(30, alphas);
    const bool bracket = rep.flip_lower && rep.flip_upper && *rep.flip_lower >= 11.0 && *rep.flip_upper <= 12.0;
    return {e2 < 1e-6 && e3 < 1e-6 && bracket,
            format("two-ion error %.1e, three-ion error %.1e (< 1e-6); N = 30 flip between alpha %.2f (zigzag) "
                   "and %.2f (linear), inside [11, 12]; uniform-density estimate alpha_c(0) = %.2f",
                   e2, e3, rep.flip_lower.value_or(NAN), rep.flip_upper.value_or(NAN), rep.critical_alpha_center)};
}

// ---------------------------------------------------------------------------
// 6

Outcome structural_identities() {
    std::mt19937_64 rng(606);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double antisym = 0.0, formula = 0.0, energy_gap = 0.0, rest_flux = 0.0, cold_current = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 19;
        const double alpha = 3.0 + 0.2 * trial;
        ChainState s(n);
        for (std::size_t i = 0; i < n; ++i) {
            s.q(Axis::x, i) = static_cast<double>(i) - 0.5 * static_cast<double>(n - 1) + 0.1 * gauss(rng);
            s.q(Axis::y, i) = 0.2 * gauss(rng);
            s.p(Axis::x, i) = 0.3 * gauss(rng);
            s.p(Axis::y, i) = 0.3 * gauss(rng);
        }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b) continue;
                const double jab = pair_current(s, a, b), jba = pair_current(s, b, a);
                antisym = std::max(antisym, std::abs(jab + jba));
                const double dx = s.q(Axis::x, a) - s.q(Axis::x, b), dy = s.q(Axis::y, a) - s.q(Axis::y, b);
                const double r = std::sqrt(dx * dx + dy * dy);
                const double j = 0.5 * (dx * (s.p(Axis::x, a) + s.p(Axis::x, b)) + dy * (s.p(Axis::y, a) + s.p(Axis::y, b))) / (r * r * r);
                formula = std::max(formula, std::abs(jab - j) / std::max(1.0, std::abs(j)));
            }
        const auto h = local_energies(s, alpha);
        double sum = 0.0;
        for (double v : h) sum += v;
        energy_gap = std::max(energy_gap, std::abs(sum - total_energy(s, alpha)) / std::abs(total_energy(s, alpha)));

        ChainState rest = s;
        for (std::size_t i = 0; i < n; ++i) rest.p(Axis::x, i) = rest.p(Axis::y, i) = 0.0;
        const auto o = instant_observables(rest, alpha);
        rest_flux = std::max({rest_flux, std::abs(o.flux[0]), std::abs(o.flux[1])});

        if (n >= 7) {
            const auto baths = build_bath_map(default_beams(n), magnesium_chain(n, alpha));
            WindowAccumulator acc(n, alpha, {0.0, 1.0});
            acc.observe(s);
            const auto m = acc.finish().batches.front();
            for (std::size_t i = 3; i + 3 < n; ++i) cold_current = std::max(cold_current, std::abs(bath_current_from(m, baths, i)));
        }
    }
    const bool ok = antisym == 0.0 && formula < 1e-12 && energy_gap < 1e-12 && rest_flux == 0.0 && cold_current == 0.0;
    return {ok, format("50 random states: |j_nl + j_ln| max %.1e, pair-current formula gap %.1e, "
                       "|sum h_n - H| / |H| max %.1e, flux at rest %.1e, bath current on unlit ions %.1e",
                       antisym, formula, energy_gap, rest_flux, cold_current)};
}

// ---------------------------------------------------------------------------
// 7

Outcome steady_state_machinery() {
    auto base = [](double left, double right) {
        auto c = chain_config(10, 13.0, left, right);
        // Inner ions need about 2000 time units to reach the bath temperature.
        c.schedule = {2e-3, 4000.0, 50, 2024};
        c.trajectories = 40;
        c.window = {2000.0, 4000.0};
        return c;
    };
    auto within = [](const Estimate& e, double k) { return std::abs(e.mean) <= std::max(k * e.std_error, residual_floor); };

    const auto sym = run_ensemble(base(-0.02, -0.02), run_opts());
    const auto asym = run_ensemble(base(-0.02, -0.1), run_opts());
    if (!sym.statistics || !asym.statistics) return {false, "ensemble produced no statistics"};
    const auto& s = *sym.statistics;
    double worst_z = 0.0;
    bool residuals = true;
    for (const auto& r : s.residual) {
        residuals &= within(r, 3.0);
        worst_z = std::max(worst_z, std::abs(r.mean) / r.std_error);
    }
    bool fluxes = true;
    double flux_z = 0.0;
    for (const auto* f : {&s.flux_direct, &s.flux_novikov})
        for (const auto& e : *f) {
            fluxes &= within(e, 3.0);
            flux_z = std::max(flux_z, std::abs(e.mean) / e.std_error);
        }

    const auto& a = *asym.statistics;
    bool agree = true;
    double agree_z = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double combined = std::hypot(a.flux_direct[k].std_error, a.flux_novikov[k].std_error);
        const double diff = std::abs(a.flux_direct[k].mean - a.flux_novikov[k].mean);
        agree &= diff <= 3.0 * combined;
        agree_z = std::max(agree_z, diff / combined);
    }
    return {residuals && fluxes && agree,
            format("symmetric baths: max |r_n| / se = %.2f, max |J| / se = %.2f over both estimators and axes (< 3); "
                   "asymmetric baths: J_x direct %.5f +- %.5f, Novikov %.5f +- %.5f, max gap %.2f combined se (< 3)",
                   worst_z, flux_z, a.flux_direct[0].mean, a.flux_direct[0].std_error, a.flux_novikov[0].mean,
                   a.flux_novikov[0].std_error, agree_z)};
}

// ---------------------------------------------------------------------------
// 8, 9, 10 share the N = 30 ensembles.

ExperimentConfig n30_config(double alpha) {
    auto c = chain_config(30, alpha, -0.02, -0.1);
    const auto params = c.params();
    const double t_end = nondimensionalize(params, 13e-3, QuantityRole::time);
    c.schedule = {2e-3, t_end, 50, 2024};
    c.window = {nondimensionalize(params, 10e-3, QuantityRole::time), t_end};
    c.trajectories = 20;
    return c;
}

std::map<double, EnsembleResult> n30_cache;

const EnsembleResult& n30(double alpha) {
    auto it = n30_cache.find(alpha);
    if (it == n30_cache.end()) it = n30_cache.emplace(alpha, run_ensemble(n30_config(alpha), run_opts())).first;
    return it->second;
}

// A profile is flat when the 99 % upper bound of its fitted end-to-end change
// over the inner ions stays below 5 % of their mean temperature.
constexpr double flat_fraction = 0.05;
constexpr double z99 = 2.5758293035489;

struct InnerProfile {
    ProfileTrend trend;
    double mean = 0.0;
    double change = 0.0;        // fitted end-to-end change
    double change_bound = 0.0;  // 99 % upper bound of |change|
};

InnerProfile inner_profile(const EnsembleResult& r, InnerRange inner) {
    InnerProfile p;
    p.trend = temperature_trend(r.summaries, inner.first, inner.last);
    const double span = static_cast<double>(inner.last - inner.first);
    for (std::size_t n = inner.first; n <= inner.last; ++n) p.mean += r.statistics->temperature[n].mean;
    p.mean /= span + 1.0;
    p.change = p.trend.slope.mean * span;
    p.change_bound = (std::abs(p.trend.slope.mean) + z99 * p.trend.slope.std_error) * span;
    return p;
}

Outcome temperature_profiles() {
    const auto& lin = n30(13.0);
    const auto& zig = n30(7.0);
    if (!lin.statistics || !zig.statistics) return {false, "ensemble produced no statistics"};
    const auto inner = inner_ions(30);
    const double crit = spearman_critical_value(inner.last - inner.first + 1);

    const auto pl = inner_profile(lin, inner);
    const auto& T = lin.statistics->temperature;
    const double end_mean = 0.5 * (T.front().mean + T.back().mean);
    const double offset = pl.mean / end_mean - 1.0;
    const bool linear_ok = pl.change_bound < flat_fraction * pl.mean && std::abs(offset) <= 0.25;

    const auto pz = inner_profile(zig, inner);
    const bool zigzag_ok = std::abs(pz.trend.spearman) > crit && std::abs(pz.trend.t_statistic) > 3.0
                           && std::abs(pz.change) > flat_fraction * pz.mean;

    return {linear_ok && zigzag_ok,
            format("N = 30, %zu trajectories per alpha, inner ions %zu..%zu; "
                   "alpha = 13: end-to-end change %+.2f%% of mean T (99%% bound %.2f%% < 5%%), rho = %+.3f, "
                   "inner mean T %.5f vs (T1 + TN)/2 = %.5f (%+.1f%%, within 25%%); "
                   "alpha = 7: change %+.1f%% of mean T (> 5%%), rho = %+.3f (critical %.3f), slope t = %+.1f (> 3)",
                   lin.summaries.size(), inner.first + 1, inner.last + 1, 100 * pl.change / pl.mean,
                   100 * pl.change_bound / pl.mean, pl.trend.spearman, pl.mean, end_mean, 100 * offset,
                   100 * pz.change / pz.mean, pz.trend.spearman, crit, pz.trend.t_statistic)};
}

Outcome flux_ordering() {
    const auto& lin = n30(13.0);
    const auto& zig = n30(7.0);
    if (!lin.statistics || !zig.statistics) return {false, "ensemble produced no statistics"};
    const auto& a = lin.statistics->flux_novikov[0];
    const auto& b = zig.statistics->flux_novikov[0];
    const double gap = std::abs(a.mean) - std::abs(b.mean);
    const double se = std::hypot(a.std_error, b.std_error);
    const auto& da = lin.statistics->flux_direct[0];
    const auto& db = zig.statistics->flux_direct[0];
    return {gap > 3.0 * se,
            format("Novikov J_x: alpha 13 %.5f +- %.5f, alpha 7 %.5f +- %.5f, difference %.1f se (> 3); "
                   "time-averaged J_x: %.5f +- %.5f vs %.5f +- %.5f",
                   a.mean, a.std_error, b.mean, b.std_error, gap / se, da.mean, da.std_error, db.mean, db.std_error)};
}

Outcome spectra() {
    const auto lin_cfg = n30_config(13.0), zig_cfg = n30_config(7.0);
    const std::size_t ion = central_ion(30);
    const auto lin = spectrum_from_record(record_trajectory(lin_cfg, 0.1), ion, lin_cfg.window);
    const auto zig = spectrum_from_record(record_trajectory(zig_cfg, 0.1), ion, zig_cfg.window);
    const double nu = 1.0 / two_pi;
    const double offset = std::abs(lin.axial_peak.frequency - nu);
    const double bin = lin.axial.bin_width();
    const bool peak_ok = offset <= 2.0 * bin;
    const bool entropy_ok = zig.axial_entropy > lin.axial_entropy;
    return {peak_ok && entropy_ok,
            format("central ion %zu, %zu samples at interval 0.1: linear axial peak at %.5f vs 1/(2 pi) = %.5f "
                   "(%.1f bins, <= 2); axial spectral entropy zigzag %.3f > linear %.3f",
                   ion + 1, lin.axial.samples, lin.axial_peak.frequency, nu, offset / bin, zig.axial_entropy,
                   lin.axial_entropy)};
}

// ---------------------------------------------------------------------------
// 11

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

int shell(const std::string& cmd) {
    const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome reproducibility() {
    auto c = chain_config(8, 9.0, -0.02, -0.1);
    c.schedule = {1e-3, 60.0, 10, 99};
    c.trajectories = 6;
    c.window = {30.0, 60.0};
    c.batches = 2;

    RunOptions one;
    const auto a = run_ensemble(c, one);
    RunOptions many;
    many.workers = 3;
    const auto b = run_ensemble(c, many);
    const fs::path ck = settings.work / "inproc_checkpoint.json";
    fs::create_directories(settings.work);
    RunOptions first;
    first.checkpoint_path = ck;
    first.stop_after = 2;
    run_ensemble(c, first);
    RunOptions second;
    second.resume = checkpoint_load(ck);
    const auto resumed = run_ensemble(c, second);
    const bool inproc = a.statistics && b.statistics && resumed.statistics && a.summaries == b.summaries
                        && *a.statistics == *b.statistics && a.summaries == resumed.summaries
                        && *a.statistics == *resumed.statistics;

    std::string cli_note = "CLI not given";
    bool cli = settings.cli.empty() ? false : true;
    if (!settings.cli.empty()) {
        const std::string config = (settings.data / "quick.json").string();
        const fs::path d1 = settings.work / "cli_a", d2 = settings.work / "cli_b", d3 = settings.work / "cli_resume";
        for (const auto& d : {d1, d2, d3}) fs::remove_all(d);
        const std::string run = "\"" + settings.cli + "\" run --quiet --config \"" + config + "\" --out ";
        const int r1 = shell(run + "\"" + d1.string() + "\"");
        const int r2 = shell(run + "\"" + d2.string() + "\" --workers 2");
        const int r3 = shell(run + "\"" + d3.string() + "\" --stop-after 3");
        const bool partial = !fs::exists(d3 / "statistics.csv");
        const int r4 = shell(run + "\"" + d3.string() + "\" --resume \"" + (d3 / "checkpoint.json").string() + "\"");
        const auto s1 = slurp(d1 / "statistics.csv"), s2 = slurp(d2 / "statistics.csv"), s3 = slurp(d3 / "statistics.csv");
        const bool codes = (r1 == 0 || r1 == 3) && r2 == r1 && r3 == 0 && r4 == r1;
        cli = codes && partial && !s1.empty() && s1 == s2 && s1 == s3
              && slurp(d1 / "config.json") == slurp(d2 / "config.json");
        cli_note = format("CLI: exit codes %d/%d/%d/%d, statistics.csv (%zu bytes) identical for 1 vs 2 workers "
                          "and for stop-after-3 + resume: %s",
                          r1, r2, r3, r4, s1.size(), (s1 == s2 && s1 == s3) ? "yes" : "no");
    }
    return {inproc && cli, format("in-process: 1 vs 3 workers and interrupted + resumed ensembles bit-identical: %s; %s",
                                  inproc ? "yes" : "no", cli_note.c_str())};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::vector<int> only;
    std::string data, work;
    app.add_option("--cli", settings.cli, "path of the ionheat executable");
    app.add_option("--data", data, "directory holding quick.json");
    app.add_option("--work", work, "scratch directory");
    app.add_option("--workers", settings.workers, "worker threads for the ensembles");
    app.add_option("criteria", only, "subset of criteria to run");
    CLI11_PARSE(app, argc, argv);
    settings.data = data.empty() ? fs::path("tests/data") : fs::path(data);
    settings.work = work.empty() ? fs::temp_directory_path() / "ionheat_acceptance" : fs::path(work);
    if (settings.workers == 0) settings.workers = std::max(1u, std::thread::hardware_concurrency());

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"force-gradient consistency", force_gradient},
        {"energy conservation", energy_conservation},
        {"weak order 2", weak_order},
        {"bath equilibration", bath_equilibration},
        {"statics oracles", statics_oracles},
        {"structural identities", structural_identities},
        {"steady-state machinery", steady_state_machinery},
        {"temperature profiles", temperature_profiles},
        {"flux ordering", flux_ordering},
        {"motion spectra", spectra},
        {"reproducibility", reproducibility},
    };
    const std::set<int> selected(only.begin(), only.end());
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k + 1);
        if (!selected.empty() && !selected.contains(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("CRITERION %2d %s  %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                    o.detail.c_str(), sec);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
