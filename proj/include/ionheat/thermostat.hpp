#pragma once

// Doppler-cooling Langevin baths.
//
// In the low-intensity regime a beam of normalized intensity s = I/I0 and
// detuning d (in units of the linewidth) gives
//   eta = -4 hbar k^2 s (2d) / (1 + 4d^2)^2
//   D   =    hbar^2 k^2 s Gamma / (1 + 4d^2)
// and the stationary bath temperature k_B T = D / eta.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ionheat/errors.hpp"
#include "ionheat/state.hpp"
#include "ionheat/units.hpp"

namespace ionheat {

struct LaserBeam {
    std::size_t target_ion = 0;  // zero-based
    Axis axis = Axis::x;
    double intensity = 0.0;      // I / I0
    double detuning = 0.0;       // delta / Gamma
};

/// Every beam uses k = omega_0 / c; detunings of order 0.1 Gamma move k by
/// less than 1e-8 relative.
inline double beam_wavenumber(const PhysicalParameters& params) {
    return params.transition_freq / constants::speed_of_light;
}

struct DopplerCoefficients {
    double friction;   // kg / s
    double diffusion;  // kg^2 m^2 / s^3
};

inline DopplerCoefficients doppler_coefficients(double intensity, double detuning,
                                                const PhysicalParameters& params) {
    if (!(intensity >= 0.0)) throw std::invalid_argument("beam intensity must be non-negative");
    const double k = beam_wavenumber(params);
    const double hk2 = constants::hbar * k * k;
    const double lorentz = 1.0 + 4.0 * detuning * detuning;
    return {-4.0 * hk2 * intensity * (2.0 * detuning) / (lorentz * lorentz),
            constants::hbar * hk2 * intensity * params.linewidth / lorentz};
}

/// Bath temperature in kelvin from SI friction and diffusion.
inline double bath_temperature(double friction, double diffusion) {
    if (!(friction > 0.0)) throw DomainError("bath temperature needs positive friction (cooling)");
    return diffusion / (constants::boltzmann * friction);
}

/// Closed form of D / (k_B eta) for a given detuning (units of Gamma).
inline double doppler_temperature(double detuning, const PhysicalParameters& params) {
    if (!(detuning < 0.0)) throw DomainError("red detuning required for cooling");
    return -constants::hbar * params.linewidth * (1.0 + 4.0 * detuning * detuning)
           / (8.0 * detuning * constants::boltzmann);
}

/// Dimensionless friction and diffusion per ion and axis.
/// Stored in the StateVector momentum layout (x block, then y block).
class BathMap {
public:
    BathMap() = default;
    explicit BathMap(std::size_t n_ions) : eta_(2 * n_ions, 0.0), diff_(2 * n_ions, 0.0) {}

    std::size_t size() const { return eta_.size() / 2; }

    double eta(std::size_t n, Axis a) const { return eta_[index(n, a)]; }
    double diffusion(std::size_t n, Axis a) const { return diff_[index(n, a)]; }
    void add(std::size_t n, Axis a, double eta, double diffusion) {
        eta_[index(n, a)] += eta;
        diff_[index(n, a)] += diffusion;
    }

    std::span<const double> eta_slots() const { return eta_; }
    std::span<const double> diffusion_slots() const { return diff_; }

    bool thermostatted(std::size_t n) const {
        return eta(n, Axis::x) != 0.0 || eta(n, Axis::y) != 0.0
               || diffusion(n, Axis::x) != 0.0 || diffusion(n, Axis::y) != 0.0;
    }

    bool empty() const {
        for (std::size_t i = 0; i < eta_.size(); ++i)
            if (eta_[i] != 0.0 || diff_[i] != 0.0) return false;
        return true;
    }

    friend bool operator==(const BathMap&, const BathMap&) = default;

private:
    std::size_t index(std::size_t n, Axis a) const {
        if (n >= size()) throw std::out_of_range("bath ion index out of range");
        return static_cast<std::size_t>(a) * size() + n;
    }

    std::vector<double> eta_;
    std::vector<double> diff_;
};

inline BathMap build_bath_map(const std::vector<LaserBeam>& beams, const PhysicalParameters& params) {
    BathMap map(params.n_ions);
    const double eta_scale = dimensionless_factor(params, QuantityRole::friction);
    const double diff_scale = dimensionless_factor(params, QuantityRole::diffusion);
    for (const auto& b : beams) {
        if (b.target_ion >= params.n_ions) throw std::out_of_range("beam targets a missing ion");
        const auto c = doppler_coefficients(b.intensity, b.detuning, params);
        map.add(b.target_ion, b.axis, c.friction * eta_scale, c.diffusion * diff_scale);
    }
    return map;
}

/// Beams on the `count` leftmost and `count` rightmost ions, both axes.
inline std::vector<LaserBeam> end_beams(std::size_t n_ions, double intensity_left, double detuning_left,
                                        double intensity_right, double detuning_right,
                                        std::size_t count = 3) {
    std::vector<LaserBeam> beams;
    for (std::size_t i = 0; i < std::min(count, n_ions); ++i)
        for (Axis a : {Axis::x, Axis::y}) beams.push_back({i, a, intensity_left, detuning_left});
    for (std::size_t i = n_ions - std::min(count, n_ions); i < n_ions; ++i)
        for (Axis a : {Axis::x, Axis::y}) beams.push_back({i, a, intensity_right, detuning_right});
    return beams;
}

/// Hot left bath (delta = -0.02 Gamma), cold right bath (delta = -0.1 Gamma), I/I0 = 0.08 each.
inline std::vector<LaserBeam> default_beams(std::size_t n_ions) {
    return end_beams(n_ions, 0.08, -0.02, 0.08, -0.1);
}

} // namespace ionheat
