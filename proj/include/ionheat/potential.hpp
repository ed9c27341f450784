#pragma once

// Trap + Coulomb potential in dimensionless form,
//   V = 1/2 sum_n (x_n^2 + alpha^2 y_n^2) + sum_{n<l} 1/|q_n - q_l|,
// together with forces, per-ion energy densities and pair energy currents.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "ionheat/errors.hpp"
#include "ionheat/state.hpp"

namespace ionheat {

/// Pairs closer than this (in units of l) are treated as a collision.
inline constexpr double min_pair_distance = 1e-9;

namespace detail {
inline double checked_distance2(double dx, double dy, std::size_t a, std::size_t b) {
    const double r2 = dx * dx + dy * dy;
    if (!(r2 >= min_pair_distance * min_pair_distance))
        throw SingularityError(a, b, std::sqrt(r2));
    return r2;
}
} // namespace detail

/// Forces stored in StateVector momentum layout: (Fx_1..Fx_N, Fy_1..Fy_N).
struct ForceField {
    std::vector<double> components;

    std::size_t size() const { return components.size() / 2; }
    double operator()(Axis a, std::size_t n) const {
        return components[static_cast<std::size_t>(a) * size() + n];
    }
};

inline double trap_energy(double x, double y, double alpha) {
    return 0.5 * (x * x + alpha * alpha * y * y);
}

inline double coulomb_energy(const Positions& q) {
    const std::size_t n = q.size();
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = q.x[i] - q.x[j];
            const double dy = q.y[i] - q.y[j];
            e += 1.0 / std::sqrt(detail::checked_distance2(dx, dy, i, j));
        }
    return e;
}

inline double potential_energy(const Positions& q, double alpha) {
    double e = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) e += trap_energy(q.x[i], q.y[i], alpha);
    return e + coulomb_energy(q);
}

inline double potential_energy(const ChainState& s, double alpha) {
    return potential_energy(Positions::of(s), alpha);
}

inline double kinetic_energy(const ChainState& s) {
    double e = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        e += 0.5 * (s.p(Axis::x, i) * s.p(Axis::x, i) + s.p(Axis::y, i) * s.p(Axis::y, i));
    return e;
}

inline double total_energy(const ChainState& s, double alpha) {
    return kinetic_energy(s) + potential_energy(s, alpha);
}

/// Writes -dV/dq into out (length 2N, x block then y block).
/// This is the hot loop of every trajectory.
inline void compute_forces(const Positions& q, double alpha, std::span<double> out) {
    const std::size_t n = q.size();
    const double a2 = alpha * alpha;
    double* fx = out.data();
    double* fy = out.data() + n;
    for (std::size_t i = 0; i < n; ++i) {
        fx[i] = -q.x[i];
        fy[i] = -a2 * q.y[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = q.x[i];
        const double yi = q.y[i];
        double sx = 0.0;
        double sy = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = xi - q.x[j];
            const double dy = yi - q.y[j];
            const double r2 = detail::checked_distance2(dx, dy, i, j);
            const double inv_r = 1.0 / std::sqrt(r2);
            const double inv_r3 = inv_r * inv_r * inv_r;
            const double cx = dx * inv_r3;
            const double cy = dy * inv_r3;
            sx += cx;
            sy += cy;
            fx[j] -= cx;
            fy[j] -= cy;
        }
        fx[i] += sx;
        fy[i] += sy;
    }
}

inline ForceField forces(const ChainState& s, double alpha) {
    ForceField f{std::vector<double>(2 * s.size())};
    compute_forces(Positions::of(s), alpha, f.components);
    return f;
}

/// Local energy density of ion n: kinetic + trap + half of each pair's Coulomb energy.
inline double local_energy(const ChainState& s, double alpha, std::size_t n) {
    if (n >= s.size()) throw std::out_of_range("ion index out of range");
    double h = 0.5 * (s.p(Axis::x, n) * s.p(Axis::x, n) + s.p(Axis::y, n) * s.p(Axis::y, n))
               + trap_energy(s.q(Axis::x, n), s.q(Axis::y, n), alpha);
    for (std::size_t l = 0; l < s.size(); ++l) {
        if (l == n) continue;
        const double dx = s.q(Axis::x, n) - s.q(Axis::x, l);
        const double dy = s.q(Axis::y, n) - s.q(Axis::y, l);
        h += 0.5 / std::sqrt(detail::checked_distance2(dx, dy, n, l));
    }
    return h;
}

/// All local energies in one O(N^2) pass.
inline std::vector<double> local_energies(const ChainState& s, double alpha) {
    const std::size_t n = s.size();
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i)
        h[i] = 0.5 * (s.p(Axis::x, i) * s.p(Axis::x, i) + s.p(Axis::y, i) * s.p(Axis::y, i))
               + trap_energy(s.q(Axis::x, i), s.q(Axis::y, i), alpha);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = s.q(Axis::x, i) - s.q(Axis::x, j);
            const double dy = s.q(Axis::y, i) - s.q(Axis::y, j);
            const double half = 0.5 / std::sqrt(detail::checked_distance2(dx, dy, i, j));
            h[i] += half;
            h[j] += half;
        }
    return h;
}

/// Energy current from ion l into ion n,
///   j_{n,l} = -1/2 sum_mu dU(|q_n - q_l|)/dq_{mu,n} (p_{mu,n} + p_{mu,l}).
inline double pair_current(const ChainState& s, std::size_t n, std::size_t l) {
    if (n >= s.size() || l >= s.size()) throw std::out_of_range("ion index out of range");
    if (n == l) throw std::invalid_argument("pair current needs two distinct ions");
    const double dx = s.q(Axis::x, n) - s.q(Axis::x, l);
    const double dy = s.q(Axis::y, n) - s.q(Axis::y, l);
    const double r2 = detail::checked_distance2(dx, dy, n, l);
    const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
    // dU/dq_n = -(q_n - q_l)/r^3
    return 0.5 * inv_r3 * (dx * (s.p(Axis::x, n) + s.p(Axis::x, l))
                           + dy * (s.p(Axis::y, n) + s.p(Axis::y, l)));
}

} // namespace ionheat
