#pragma once

// Fast invariant checks run by the `validate` command. Each check is
// self-contained and finishes in well under a second.

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "ionheat/integrator.hpp"
#include "ionheat/observables.hpp"
#include "ionheat/potential.hpp"
#include "ionheat/random.hpp"
#include "ionheat/statics.hpp"
#include "ionheat/thermostat.hpp"
#include "ionheat/units.hpp"

namespace ionheat {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline ChainState random_chain(std::size_t n, std::uint64_t seed, double p_scale = 0.3) {
    auto s = initial_conditions(relax_linear_chain(n), 0.05, seed);
    GaussianStream g(seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = 0; i < n; ++i)
        for (Axis a : {Axis::x, Axis::y}) s.p(a, i) = p_scale * g();
    return s;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(4) << v;
    return os.str();
}

} // namespace detail

inline CheckResult check_force_gradient() {
    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        const std::size_t n = 2 + trial * 2;
        auto s = detail::random_chain(n, 11 + trial);
        const double alpha = 3.0 + trial;
        const auto f = forces(s, alpha);
        for (std::size_t i = 0; i < n; ++i)
            for (Axis a : {Axis::x, Axis::y}) {
                const double h = 1e-5, x0 = s.q(a, i);
                s.q(a, i) = x0 + h;
                const double up = potential_energy(s, alpha);
                s.q(a, i) = x0 - h;
                const double dn = potential_energy(s, alpha);
                s.q(a, i) = x0;
                const double fd = -(up - dn) / (2.0 * h);
                const double fa = f.components[static_cast<std::size_t>(a) * n + i];
                worst = std::max(worst, std::abs(fa - fd) / std::max(1.0, std::abs(fa)));
            }
    }
    return {"force matches -grad V (central differences)", worst < 1e-6, "max relative error " + detail::fmt(worst)};
}

inline CheckResult check_structural_identities() {
    const auto s = detail::random_chain(8, 99);
    const double alpha = 6.0;
    double anti = 0.0;
    for (std::size_t n = 0; n < 8; ++n)
        for (std::size_t l = 0; l < 8; ++l)
            if (n != l) anti = std::max(anti, std::abs(pair_current(s, n, l) + pair_current(s, l, n)));
    double sum_h = 0.0;
    for (double h : local_energies(s, alpha)) sum_h += h;
    const double partition = std::abs(sum_h - total_energy(s, alpha)) / std::abs(total_energy(s, alpha));
    ChainState still = s;
    for (std::size_t i = 0; i < 8; ++i) still.p(Axis::x, i) = still.p(Axis::y, i) = 0.0;
    const auto flux = total_heat_flux_instant(still, alpha);
    const double zero_flux = std::max(std::abs(flux[0]), std::abs(flux[1]));
    const auto baths = build_bath_map(default_beams(8), magnesium_chain(8, alpha));
    double inner_bath = 0.0;
    for (std::size_t n = 3; n < 5; ++n) inner_bath = std::max(inner_bath, std::abs(bath_friction_power(s, baths, n)));
    const bool ok = anti == 0.0 && partition < 1e-13 && zero_flux == 0.0 && inner_bath == 0.0;
    return {"pair-current antisymmetry, energy partition, zero flux at rest, no bath on inner ions", ok,
            "antisymmetry " + detail::fmt(anti) + ", partition " + detail::fmt(partition)};
}

inline CheckResult check_energy_conservation() {
    const std::size_t n = 5;
    const auto s0 = detail::random_chain(n, 5);
    const double alpha = 8.0;
    std::vector<double> y = to_state_vector(s0);
    const LangevinModel model(alpha, BathMap(n));
    PlatenStepper stepper(model);
    const std::vector<double> zeros(2 * n, 0.0);
    for (std::size_t k = 0; k < 20000; ++k) stepper.step(y, 1e-4, zeros, k);
    const double e0 = total_energy(s0, alpha);
    const double e1 = total_energy(from_state_vector(y, 2.0), alpha);
    const double drift = std::abs(e1 - e0) / std::abs(e0);
    return {"energy conserved without baths (t = 2, dt = 1e-4)", drift < 1e-6, "relative drift " + detail::fmt(drift)};
}

inline CheckResult check_statics() {
    const auto two = relax_equilibrium(2, 10.0);
    const auto three = relax_equilibrium(3, 10.0);
    const double e2 = std::abs(two.positions[1][0] - two.positions[0][0] - std::cbrt(2.0));
    const double e3 = std::abs(three.positions[2][0] - std::cbrt(1.25));
    return {"two- and three-ion equilibria", e2 < 1e-6 && e3 < 1e-6,
            "separation error " + detail::fmt(e2) + ", outer-ion error " + detail::fmt(e3)};
}

inline CheckResult check_bath_temperature() {
    const auto p = magnesium_chain(1, 13.0);
    const double tl = doppler_temperature(-0.02, p), tr = doppler_temperature(-0.1, p);
    const auto c = doppler_coefficients(0.08, -0.02, p);
    const double tk = bath_temperature(c.friction, c.diffusion);
    const bool ok = std::abs(tl - 12.4e-3) < 0.05e-3 && std::abs(tk - tl) < 1e-12 * tl && std::abs(tl / tr - 4.815) < 0.01;
    return {"Doppler bath temperatures", ok, "T_L " + detail::fmt(tl * 1e3) + " mK, T_L/T_R " + detail::fmt(tl / tr)};
}

inline CheckResult check_units() {
    const auto p = magnesium_chain(30, 13.0);
    const double ell = characteristic_length(p);
    const double t = nondimensionalize(p, 13e-3, QuantityRole::time);
    const double back = from_dimensionless(p, t, QuantityRole::time);
    const bool ok = std::abs(ell - 3.886e-5) < 0.01e-5 && std::abs(t - 4084.07) < 0.05 && std::abs(back - 13e-3) < 1e-16;
    return {"unit system", ok, "length " + detail::fmt(ell) + " m, 13 ms -> " + detail::fmt(t)};
}

inline CheckResult check_seed_derivation() {
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 100000; ++k) seen.insert(derive_seed(42, k));
    const bool ok = seen.size() == 100000 && derive_seed(42, 7) == derive_seed(42, 7) && derive_seed(1, 7) != derive_seed(2, 7);
    return {"per-trajectory seeds distinct and deterministic", ok, std::to_string(seen.size()) + " distinct"};
}

inline std::vector<CheckResult> run_validation_suite() {
    std::vector<std::function<CheckResult()>> checks{check_force_gradient,   check_structural_identities,
                                                     check_energy_conservation, check_statics,
                                                     check_bath_temperature, check_units, check_seed_derivation};
    std::vector<CheckResult> out;
    for (auto& c : checks) {
        try {
            out.push_back(c());
        } catch (const std::exception& e) {
            out.push_back({"check raised", false, e.what()});
        }
    }
    return out;
}

} // namespace ionheat
