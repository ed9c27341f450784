#pragma once

// Physical constants and the mapping between SI quantities and the
// dimensionless variables used by every simulation kernel.
//
// Scales: length l with l^3 = Q^2 / (4 pi eps0 m nu^2), time 1/nu,
// energy l^2 m nu^2, momentum l m nu.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string_view>

#include "ionheat/errors.hpp"

namespace ionheat {

/// CODATA 2018 values.
namespace constants {
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double boltzmann = 1.380649e-23;        // J / K
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F / m
inline constexpr double elementary_charge = 1.602176634e-19;    // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27;   // kg
inline constexpr double speed_of_light = 299792458.0;           // m / s
inline constexpr double coulomb_constant =
    1.0 / (4.0 * std::numbers::pi * vacuum_permittivity);
} // namespace constants

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct PhysicalParameters {
    double ion_mass = 24.0 * constants::atomic_mass_unit;  // kg
    double ion_charge = constants::elementary_charge;      // C
    double axial_freq = two_pi * 50.0e3;                   // rad/s
    double aspect_ratio = 13.0;                            // nu_t / nu
    double transition_freq = two_pi * 1069.0e12;           // rad/s
    double linewidth = two_pi * 41.296e6;                  // rad/s
    std::size_t n_ions = 30;

    /// Throws InvalidParameter when any invariant fails.
    void validate() const {
        auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!positive(ion_mass)) throw InvalidParameter("ion mass must be positive");
        if (!positive(ion_charge)) throw InvalidParameter("ion charge must be positive");
        if (!positive(axial_freq)) throw InvalidParameter("axial frequency must be positive");
        if (!positive(aspect_ratio)) throw InvalidParameter("aspect ratio must be positive");
        if (!positive(transition_freq)) throw InvalidParameter("transition frequency must be positive");
        if (!positive(linewidth)) throw InvalidParameter("linewidth must be positive");
        if (n_ions < 1) throw InvalidParameter("chain needs at least one ion");
    }
};

/// Physical parameters of the 24Mg+ chain used throughout the experiments.
inline PhysicalParameters magnesium_chain(std::size_t n_ions = 30, double aspect_ratio = 13.0) {
    PhysicalParameters p;
    p.n_ions = n_ions;
    p.aspect_ratio = aspect_ratio;
    return p;
}

/// Cube root built from frexp/ldexp and basic arithmetic only. Library cbrt may
/// differ by an ulp from the value the compiler folds for constant arguments, and
/// the chain geometry would then depend on inlining decisions.
inline double portable_cbrt(double x) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    const bool negative = x < 0.0;
    int e = 0;
    double m = std::frexp(negative ? -x : x, &e);
    const int r = ((e % 3) + 3) % 3;
    m = std::ldexp(m, r);
    e -= r;
    double y = 1.0;
    for (int i = 0; i < 12; ++i) y -= (y * y * y - m) / (3.0 * y * y);
    y = std::ldexp(y, e / 3);
    return negative ? -y : y;
}

inline double characteristic_length(const PhysicalParameters& params) {
    if (!(params.ion_mass > 0.0) || !(params.axial_freq > 0.0) || !(params.ion_charge > 0.0))
        throw InvalidParameter("characteristic length needs positive mass, charge and frequency");
    const double q2 = params.ion_charge * params.ion_charge * constants::coulomb_constant;
    return portable_cbrt(q2 / (params.ion_mass * params.axial_freq * params.axial_freq));
}

struct UnitSystem {
    double length_scale;    // m
    double time_scale;      // s
    double energy_scale;    // J
    double momentum_scale;  // kg m / s

    static UnitSystem from(const PhysicalParameters& params) {
        const double l = characteristic_length(params);
        const double m = params.ion_mass;
        const double nu = params.axial_freq;
        return {l, 1.0 / nu, l * l * m * nu * nu, l * m * nu};
    }
};

enum class QuantityRole {
    time,
    length,
    momentum,
    friction,
    diffusion,
    energy,
    current,     // pair or bath energy current
    flux,        // total heat flux (energy x length / time)
    temperature,
};

/// Dimensionless value per SI unit for the given role.
inline double dimensionless_factor(const PhysicalParameters& params, QuantityRole role) {
    const double l = characteristic_length(params);
    const double m = params.ion_mass;
    const double nu = params.axial_freq;
    switch (role) {
    case QuantityRole::time: return nu;
    case QuantityRole::length: return 1.0 / l;
    case QuantityRole::momentum: return 1.0 / (l * m * nu);
    case QuantityRole::friction: return 1.0 / (m * nu);
    case QuantityRole::diffusion: return 1.0 / (l * l * m * m * nu * nu * nu);
    case QuantityRole::energy: return 1.0 / (l * l * m * nu * nu);
    case QuantityRole::current: return 1.0 / (l * l * m * nu * nu * nu);
    case QuantityRole::flux: return 1.0 / (l * l * l * m * nu * nu * nu);
    case QuantityRole::temperature: return constants::boltzmann / (l * l * m * nu * nu);
    }
    throw std::invalid_argument("unknown quantity role");
}

inline double nondimensionalize(const PhysicalParameters& params, double value_si, QuantityRole role) {
    return value_si * dimensionless_factor(params, role);
}

inline double from_dimensionless(const PhysicalParameters& params, double value, QuantityRole role) {
    return value / dimensionless_factor(params, role);
}

inline double temperature_to_kelvin(const PhysicalParameters& params, double dimensionless_temperature) {
    if (!(dimensionless_temperature >= 0.0))
        throw std::invalid_argument("temperature must be non-negative");
    return from_dimensionless(params, dimensionless_temperature, QuantityRole::temperature);
}

inline std::string_view to_string(QuantityRole role) {
    switch (role) {
    case QuantityRole::time: return "time";
    case QuantityRole::length: return "length";
    case QuantityRole::momentum: return "momentum";
    case QuantityRole::friction: return "friction";
    case QuantityRole::diffusion: return "diffusion";
    case QuantityRole::energy: return "energy";
    case QuantityRole::current: return "current";
    case QuantityRole::flux: return "flux";
    case QuantityRole::temperature: return "temperature";
    }
    return "unknown";
}

} // namespace ionheat
