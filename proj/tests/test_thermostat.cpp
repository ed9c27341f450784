#include <cmath>

#include <gtest/gtest.h>

#include "ionheat/thermostat.hpp"

using namespace ionheat;

namespace {

constexpr double hbar = 1.054571817e-34;
constexpr double kb = 1.380649e-23;
constexpr double c_light = 299792458.0;

double gamma_rad() { return 2.0 * M_PI * 41.296e6; }
double wavenumber() { return 2.0 * M_PI * 1069e12 / c_light; }

double analytic_temperature(double d) { return hbar * gamma_rad() * (1.0 + 4.0 * d * d) / (-8.0 * d * kb); }

} // namespace

TEST(DopplerCoefficients, ResonantBeamHasNoFriction) {
    const auto p = magnesium_chain();
    const auto c = doppler_coefficients(0.08, 0.0, p);
    EXPECT_EQ(c.friction, 0.0);
    const double k = wavenumber();
    EXPECT_NEAR(c.diffusion / (hbar * hbar * k * k * 0.08 * gamma_rad()), 1.0, 1e-12);
}

TEST(DopplerCoefficients, LeftBeamAgainstDirectFormula) {
    const auto p = magnesium_chain();
    const auto c = doppler_coefficients(0.08, -0.02, p);
    const double k = wavenumber();
    const long double l = 1.0L + 4.0L * 0.0004L;
    const long double eta = -4.0L * hbar * k * k * 0.08L * (2.0L * -0.02L) / (l * l);
    const long double d = static_cast<long double>(hbar) * hbar * k * k * 0.08L * gamma_rad() / l;
    EXPECT_GT(c.friction, 0.0);
    EXPECT_GT(c.diffusion, 0.0);
    EXPECT_NEAR(c.friction / static_cast<double>(eta), 1.0, 1e-13);
    EXPECT_NEAR(c.diffusion / static_cast<double>(d), 1.0, 1e-13);
}

TEST(DopplerCoefficients, SignConventions) {
    const auto p = magnesium_chain();
    EXPECT_GT(doppler_coefficients(0.1, -0.3, p).friction, 0.0);
    EXPECT_LT(doppler_coefficients(0.1, 0.3, p).friction, 0.0);
    EXPECT_GT(doppler_coefficients(0.1, 0.3, p).diffusion, 0.0);
    EXPECT_EQ(doppler_coefficients(0.0, -0.3, p).diffusion, 0.0);
    EXPECT_THROW(doppler_coefficients(-0.1, -0.3, p), std::invalid_argument);
}

TEST(BathTemperature, LeftAndRightBaths) {
    const auto p = magnesium_chain();
    const auto l = doppler_coefficients(0.08, -0.02, p);
    const auto r = doppler_coefficients(0.08, -0.1, p);
    const double tl = bath_temperature(l.friction, l.diffusion);
    const double tr = bath_temperature(r.friction, r.diffusion);
    EXPECT_NEAR(tl / analytic_temperature(-0.02), 1.0, 1e-12);
    EXPECT_NEAR(tr / analytic_temperature(-0.1), 1.0, 1e-12);
    EXPECT_NEAR(tl, 12.4e-3, 0.05e-3);
    EXPECT_NEAR(tr, 2.57e-3, 0.01e-3);
    EXPECT_NEAR(tl / tr, ((1.0 + 0.0016) / 0.16) / ((1.0 + 0.04) / 0.8), 1e-12);
    EXPECT_NEAR(tl / tr, 4.815, 1e-3);
}

TEST(BathTemperature, DopplerMinimumAtHalfLinewidth) {
    const auto p = magnesium_chain();
    EXPECT_NEAR(doppler_temperature(-0.5, p) * kb / (0.5 * hbar * gamma_rad()), 1.0, 1e-13);
    EXPECT_GT(doppler_temperature(-0.45, p), doppler_temperature(-0.5, p));
    EXPECT_GT(doppler_temperature(-0.55, p), doppler_temperature(-0.5, p));
}

TEST(BathTemperature, HeatingBeamHasNoTemperature) {
    EXPECT_THROW(bath_temperature(-1.0, 1.0), DomainError);
    EXPECT_THROW(doppler_temperature(0.1, magnesium_chain()), DomainError);
}

TEST(BuildBathMap, DefaultLayoutForThirtyIons) {
    const auto p = magnesium_chain(30);
    const auto m = build_bath_map(default_beams(30), p);
    for (std::size_t n = 0; n < 30; ++n) {
        const bool bath = n < 3 || n >= 27;
        EXPECT_EQ(m.thermostatted(n), bath) << n;
        for (Axis a : {Axis::x, Axis::y}) {
            EXPECT_EQ(m.eta(n, a) > 0.0, bath);
            EXPECT_EQ(m.diffusion(n, a) > 0.0, bath);
        }
    }
    const double eta_scale = dimensionless_factor(p, QuantityRole::friction);
    EXPECT_NEAR(m.eta(0, Axis::x), doppler_coefficients(0.08, -0.02, p).friction * eta_scale, 1e-15);
    EXPECT_NEAR(m.diffusion(0, Axis::x) / m.eta(0, Axis::x),
                nondimensionalize(p, analytic_temperature(-0.02), QuantityRole::temperature), 1e-12);
}

TEST(BuildBathMap, EmptyBeamList) {
    const auto m = build_bath_map({}, magnesium_chain(5));
    EXPECT_TRUE(m.empty());
    EXPECT_EQ(m.size(), 5u);
}

TEST(BuildBathMap, SixIonsAllThermostatted) {
    const auto m = build_bath_map(default_beams(6), magnesium_chain(6));
    for (std::size_t n = 0; n < 6; ++n) EXPECT_TRUE(m.thermostatted(n));
    EXPECT_LT(m.eta(2, Axis::x), m.eta(3, Axis::x));  // the cold bath has the larger friction
}

TEST(BuildBathMap, DimensionlessRoundTrip) {
    const auto p = magnesium_chain(4);
    const auto m = build_bath_map({{1, Axis::y, 0.2, -0.3}}, p);
    const auto c = doppler_coefficients(0.2, -0.3, p);
    EXPECT_NEAR(from_dimensionless(p, m.eta(1, Axis::y), QuantityRole::friction) / c.friction, 1.0, 1e-12);
    EXPECT_NEAR(from_dimensionless(p, m.diffusion(1, Axis::y), QuantityRole::diffusion) / c.diffusion, 1.0, 1e-12);
    EXPECT_EQ(m.eta(1, Axis::x), 0.0);
}

TEST(BuildBathMap, BeamOnMissingIon) {
    EXPECT_THROW(build_bath_map({{4, Axis::x, 0.1, -0.1}}, magnesium_chain(4)), std::out_of_range);
}

TEST(BuildBathMap, DimensionlessDefaultsMatchKnownValues) {
    const auto p = magnesium_chain(30);
    const auto m = build_bath_map(default_beams(30), p);
    EXPECT_NEAR(m.diffusion(0, Axis::x) / m.eta(0, Axis::x), 0.02885, 2e-5);
    EXPECT_NEAR(m.diffusion(29, Axis::x) / m.eta(29, Axis::x), 0.00599, 1e-5);
}
