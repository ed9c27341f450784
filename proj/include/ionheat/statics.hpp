#pragma once

// Equilibrium configurations of the planar ion chain and the structural
// (linear / zigzag) classification.
//
// Relaxation runs FIRE (damped inertial descent) until the gradient is
// small, then polishes with Newton steps on the analytic Hessian as long
// as the Hessian is positive definite.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "ionheat/errors.hpp"
#include "ionheat/potential.hpp"
#include "ionheat/random.hpp"
#include "ionheat/state.hpp"
#include "ionheat/units.hpp"

namespace ionheat {

inline constexpr double apery_constant = 1.2020569031595942854;  // zeta(3)
inline constexpr double default_zigzag_threshold = 1e-3;
inline constexpr double default_relax_tolerance = 1e-10;
inline constexpr double default_jitter = 1e-3;

enum class Phase { linear, zigzag };

inline const char* to_string(Phase p) { return p == Phase::linear ? "linear" : "zigzag"; }

struct EquilibriumConfiguration {
    std::vector<Vec2> positions;  // sorted by x
    double residual_force_norm = 0.0;
    Phase phase = Phase::linear;
    double transverse_amplitude = 0.0;
    double energy = 0.0;
    int iterations = 0;

    std::size_t size() const { return positions.size(); }

    /// max |x_n|
    double half_length() const {
        double l = 0.0;
        for (const auto& p : positions) l = std::max(l, std::abs(p[0]));
        return l;
    }

    ChainState to_state() const {
        ChainState s(size());
        for (std::size_t i = 0; i < size(); ++i) {
            s.q(Axis::x, i) = positions[i][0];
            s.q(Axis::y, i) = positions[i][1];
        }
        return s;
    }
};

/// Zigzag iff max |y_n| strictly exceeds the threshold.
inline Phase classify_phase(std::span<const Vec2> positions, double threshold = default_zigzag_threshold) {
    double amp = 0.0;
    for (const auto& p : positions) amp = std::max(amp, std::abs(p[1]));
    return amp > threshold ? Phase::zigzag : Phase::linear;
}

struct RelaxOptions {
    double tolerance = default_relax_tolerance;  // on the gradient infinity norm
    int max_iterations = 2'000'000;
    double fire_dt = 0.01;
    double fire_dt_max = 0.1;
    double newton_switch = 1e-6;  // gradient norm below which Newton polishing is attempted
};

namespace detail {

inline double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Hessian of the dimensionless potential in (x block, y block) ordering.
inline Eigen::MatrixXd potential_hessian(const Positions& q, double alpha) {
    const auto n = static_cast<Eigen::Index>(q.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) = 1.0;
        h(n + i, n + i) = alpha * alpha;
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d[2] = {q.x[i] - q.x[j], q.y[i] - q.y[j]};
            const double r2 = checked_distance2(d[0], d[1], i, j);
            const double r = std::sqrt(r2);
            const double inv_r3 = 1.0 / (r2 * r);
            const double inv_r5 = inv_r3 / r2;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const double k = 3.0 * d[a] * d[b] * inv_r5 - (a == b ? inv_r3 : 0.0);
                    const Eigen::Index ia = a * n + i, ja = a * n + j;
                    const Eigen::Index ib = b * n + i, jb = b * n + j;
                    h(ia, ib) += k;
                    h(ja, jb) += k;
                    h(ia, jb) -= k;
                    h(ja, ib) -= k;
                }
        }
    return h;
}

/// One Newton step on coordinates (2N, x block then y block). Returns false
/// when the Hessian is not positive definite or the step does not reduce the
/// gradient.
inline bool newton_polish(std::vector<double>& coords, double alpha, std::vector<double>& force) {
    const std::size_t n = coords.size() / 2;
    auto pos = [&](const std::vector<double>& c) {
        return Positions{std::span<const double>(c.data(), n), std::span<const double>(c.data() + n, n)};
    };
    Eigen::LLT<Eigen::MatrixXd> llt(potential_hessian(pos(coords), alpha));
    if (llt.info() != Eigen::Success) return false;
    Eigen::Map<const Eigen::VectorXd> f(force.data(), static_cast<Eigen::Index>(force.size()));
    const Eigen::VectorXd step = llt.solve(f);  // H dq = -grad = F
    std::vector<double> trial(coords);
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += step[static_cast<Eigen::Index>(i)];
    std::vector<double> trial_force(force.size());
    compute_forces(pos(trial), alpha, trial_force);
    if (!(inf_norm(trial_force) < inf_norm(force))) return false;
    coords = std::move(trial);
    force = std::move(trial_force);
    return true;
}

} // namespace detail

/// Evenly spaced guess on the axis with a small deterministic transverse jitter.
inline std::vector<Vec2> default_guess(std::size_t n, double transverse_jitter = default_jitter) {
    std::vector<Vec2> g(n);
    const double half = portable_cbrt(3.0 * static_cast<double>(n));
    GaussianStream rng(0x5eed);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = n == 1 ? 0.0 : -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1);
        g[i] = {x, transverse_jitter * (2.0 * rng.uniform() - 1.0)};
    }
    return g;
}

inline EquilibriumConfiguration relax_equilibrium(std::size_t n, double alpha,
                                                  std::optional<std::vector<Vec2>> initial_guess = std::nullopt,
                                                  const RelaxOptions& opt = {}) {
    if (n < 1) throw InvalidParameter("chain needs at least one ion");
    const auto guess = initial_guess ? *initial_guess : default_guess(n);
    if (guess.size() != n) throw std::invalid_argument("initial guess has the wrong number of ions");

    std::vector<double> c(2 * n), v(2 * n, 0.0), f(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = guess[i][0];
        c[n + i] = guess[i][1];
    }
    auto eval = [&] {
        compute_forces(Positions{std::span<const double>(c.data(), n), std::span<const double>(c.data() + n, n)},
                       alpha, f);
    };
    eval();

    // FIRE parameters (Bitzek et al. defaults)
    constexpr int n_min = 5;
    constexpr double f_inc = 1.1, f_dec = 0.5, a_start = 0.1, f_a = 0.99;
    double dt = opt.fire_dt, a = a_start;
    int since_negative = 0;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        const double g = detail::inf_norm(f);
        if (g < opt.tolerance) break;
        if (g < opt.newton_switch && detail::newton_polish(c, alpha, f)) {
            std::fill(v.begin(), v.end(), 0.0);
            continue;
        }
        double power = 0.0, vn = 0.0, fn = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            power += f[i] * v[i];
            vn += v[i] * v[i];
            fn += f[i] * f[i];
        }
        if (power > 0.0) {
            const double scale = fn > 0.0 ? std::sqrt(vn / fn) : 0.0;
            for (std::size_t i = 0; i < c.size(); ++i) v[i] = (1.0 - a) * v[i] + a * scale * f[i];
            if (++since_negative > n_min) {
                dt = std::min(dt * f_inc, opt.fire_dt_max);
                a *= f_a;
            }
        } else {
            std::fill(v.begin(), v.end(), 0.0);
            since_negative = 0;
            dt *= f_dec;
            a = a_start;
        }
        // semi-implicit Euler, unit masses
        for (std::size_t i = 0; i < c.size(); ++i) {
            v[i] += dt * f[i];
            c[i] += dt * v[i];
        }
        eval();
    }
    const double residual = detail::inf_norm(f);
    if (!(residual < opt.tolerance))
        throw ConvergenceError("relaxation did not converge: gradient norm " + std::to_string(residual));

    EquilibriumConfiguration eq;
    eq.positions.resize(n);
    for (std::size_t i = 0; i < n; ++i) eq.positions[i] = {c[i], c[n + i]};
    std::sort(eq.positions.begin(), eq.positions.end(), [](const Vec2& l, const Vec2& r) { return l[0] < r[0]; });
    eq.residual_force_norm = residual;
    eq.transverse_amplitude = 0.0;
    for (const auto& p : eq.positions) eq.transverse_amplitude = std::max(eq.transverse_amplitude, std::abs(p[1]));
    eq.phase = classify_phase(eq.positions);
    eq.energy = potential_energy(eq.to_state(), alpha);
    eq.iterations = it;
    return eq;
}

/// The purely axial equilibrium (y = 0 stays exactly 0 under relaxation).
inline EquilibriumConfiguration relax_linear_chain(std::size_t n, const RelaxOptions& opt = {}) {
    return relax_equilibrium(n, 1.0, default_guess(n, 0.0), opt);
}

/// Parabolic equilibrium density n(x) = (3N / 4L) (1 - (x/L)^2).
inline double linear_density(double x, std::size_t n, double half_length) {
    if (!(half_length > 0.0)) throw DomainError("half length must be positive");
    if (std::abs(x) > half_length) throw DomainError("position outside the chain");
    const double u = x / half_length;
    return 3.0 * static_cast<double>(n) / (4.0 * half_length) * (1.0 - u * u);
}

/// Local critical aspect ratio in dimensionless units:
///   alpha_c(x) = sqrt(7 zeta(3) / 2) n(x)^{3/2}, with x, L in units of l.
inline double critical_alpha(double x, std::size_t n, double half_length) {
    const double density = linear_density(x, n, half_length);
    return std::sqrt(3.5 * apery_constant) * std::pow(density, 1.5);
}

/// Same quantity from SI inputs (x, L in metres).
inline double critical_alpha_si(double x, std::size_t n, double half_length, const PhysicalParameters& params) {
    const double density = linear_density(x, n, half_length);
    const double nu = params.axial_freq;
    const double q2 = params.ion_charge * params.ion_charge * constants::coulomb_constant;
    return std::sqrt(7.0 * apery_constant / (2.0 * params.ion_mass * nu * nu) * q2) * std::pow(density, 1.5);
}

/// Relaxed linear chain plus uniform jitter in [-jitter, jitter] on both axes; ions at rest.
inline ChainState initial_conditions(const EquilibriumConfiguration& linear, double jitter, std::uint64_t seed) {
    if (!(jitter >= 0.0)) throw InvalidParameter("jitter must be non-negative");
    ChainState s = linear.to_state();
    if (jitter > 0.0) {
        Xoshiro256 rng(seed);
        for (std::size_t i = 0; i < s.size(); ++i)
            for (Axis a : {Axis::x, Axis::y}) s.q(a, i) += jitter * (2.0 * rng.uniform() - 1.0);
    }
    return s;
}

inline ChainState initial_conditions(std::size_t n, double jitter, std::uint64_t seed) {
    return initial_conditions(relax_linear_chain(n), jitter, seed);
}

} // namespace ionheat
