#pragma once

// Langevin dynamics
//   dq = p dt,   dp = -(dV/dq + eta p) dt + sqrt(2 D) dW
// advanced with Platen's explicit order-2.0 weak scheme for additive noise:
//   G    = Y + A(Y) dt + B dOmega
//   Y'   = Y + (A(G) + A(Y)) dt / 2 + B dOmega
// where dOmega is sqrt(dt) times a standard normal on every momentum slot
// and zero on every position slot.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ionheat/errors.hpp"
#include "ionheat/potential.hpp"
#include "ionheat/random.hpp"
#include "ionheat/state.hpp"
#include "ionheat/thermostat.hpp"

namespace ionheat {

inline constexpr double default_time_step = 1e-4;
inline constexpr double blow_up_threshold = 1e9;

struct SimulationSchedule {
    double dt = default_time_step;
    double t_end = 1.0;
    std::size_t sample_stride = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("time step must be positive");
        if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidParameter("final time must be positive");
        if (sample_stride < 1) throw InvalidParameter("sample stride must be at least 1");
    }

    /// Non-fatal remarks (currently: a step above the default bound).
    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (dt > default_time_step)
            w.push_back("time step " + std::to_string(dt) + " exceeds the default bound 1e-4");
        return w;
    }

    /// Number of steps to reach t_end; exact multiples are not rounded up.
    long long steps() const {
        const double ratio = t_end / dt;
        const double nearest = std::round(ratio);
        if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) return static_cast<long long>(nearest);
        return static_cast<long long>(std::ceil(ratio));
    }

    std::size_t sample_count() const {
        return static_cast<std::size_t>(steps()) / sample_stride + 1;
    }

    /// Potential/force evaluations spent by a trajectory (two per step).
    long long force_evaluations() const { return 2 * steps(); }

    friend bool operator==(const SimulationSchedule&, const SimulationSchedule&) = default;
};

/// Deterministic part of the dynamics together with the noise amplitudes.
class LangevinModel {
public:
    LangevinModel(double alpha, BathMap baths) : alpha_(alpha), baths_(std::move(baths)) {
        const auto d = baths_.diffusion_slots();
        noise_.resize(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d[i] < 0.0) throw InvalidParameter("diffusion coefficients must be non-negative");
            noise_[i] = std::sqrt(2.0 * d[i]);
        }
    }

    double alpha() const { return alpha_; }
    const BathMap& baths() const { return baths_; }
    std::size_t size() const { return baths_.size(); }

    /// Writes A(Y) into out; both spans have length 4N.
    void drift(std::span<const double> y, std::span<double> out) const {
        const std::size_t n = size();
        const std::size_t m = 2 * n;
        if (y.size() != 4 * n || out.size() != 4 * n)
            throw std::invalid_argument("state vector does not match the bath map");
        compute_forces(Positions::of(y), alpha_, out.subspan(m, m));
        const auto eta = baths_.eta_slots();
        for (std::size_t i = 0; i < m; ++i) {
            out[i] = y[m + i];
            out[m + i] -= eta[i] * y[m + i];
        }
    }

    /// B diagonal restricted to momentum slots: sqrt(2 D).
    std::span<const double> noise_amplitudes() const { return noise_; }

private:
    double alpha_;
    BathMap baths_;
    std::vector<double> noise_;
};

inline StateVector drift(const StateVector& y, double alpha, const BathMap& baths) {
    StateVector a(y.size());
    LangevinModel(alpha, baths).drift(y, a);
    return a;
}

/// Reusable buffers so the stepping loop never allocates.
class PlatenStepper {
public:
    explicit PlatenStepper(const LangevinModel& model)
        : model_(&model), a_y_(4 * model.size()), a_g_(4 * model.size()),
          predictor_(4 * model.size()), kick_(2 * model.size()) {}

    /// Advances y in place. `gaussians` holds 2N standard normals in
    /// momentum-slot order (x block, then y block).
    void step(std::span<double> y, double dt, std::span<const double> gaussians, long long step_index = -1) {
        const std::size_t m = 2 * model_->size();
        if (gaussians.size() != m) throw std::invalid_argument("need exactly 2N gaussian draws per step");
        const auto b = model_->noise_amplitudes();
        const double sqrt_dt = std::sqrt(dt);
        for (std::size_t i = 0; i < m; ++i) kick_[i] = b[i] * sqrt_dt * gaussians[i];

        model_->drift(y, a_y_);
        for (std::size_t i = 0; i < 2 * m; ++i) predictor_[i] = y[i] + a_y_[i] * dt;
        for (std::size_t i = 0; i < m; ++i) predictor_[m + i] += kick_[i];

        model_->drift(predictor_, a_g_);
        const double half_dt = 0.5 * dt;
        bool ok = true;
        for (std::size_t i = 0; i < 2 * m; ++i) {
            double v = y[i] + (a_g_[i] + a_y_[i]) * half_dt;
            if (i >= m) v += kick_[i - m];
            y[i] = v;
            ok &= std::abs(v) <= blow_up_threshold;  // false for NaN as well
        }
        if (!ok) throw BlowUpError(step_index, std::nan(""));
    }

private:
    const LangevinModel* model_;
    std::vector<double> a_y_, a_g_, predictor_, kick_;
};

inline StateVector platen_step(const StateVector& y, double dt, std::span<const double> gaussians,
                               double alpha, const BathMap& baths) {
    LangevinModel model(alpha, baths);
    PlatenStepper stepper(model);
    StateVector out = y;
    stepper.step(out, dt, gaussians);
    return out;
}

struct TrajectoryRecord {
    SimulationSchedule schedule;
    double alpha = 0.0;
    std::vector<double> times;
    std::vector<StateVector> states;
    long long force_evaluations = 0;

    std::size_t size() const { return states.size(); }
    ChainState state(std::size_t i) const { return ChainState(states[i], times[i]); }
    friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

/// Runs one trajectory and calls observer(state, sample_index) at t = 0 and
/// every `sample_stride` steps. Returns the number of force evaluations.
/// A blow-up rethrows with the last good time filled in.
template <class Observer>
long long simulate_trajectory(const ChainState& initial, const LangevinModel& model,
                              const SimulationSchedule& schedule, Observer&& observer) {
    schedule.validate();
    if (initial.size() != model.size()) throw std::invalid_argument("initial state does not match the bath map");
    ChainState state = initial;
    const double t0 = initial.time();
    const long long steps = schedule.steps();
    PlatenStepper stepper(model);
    GaussianStream noise(schedule.seed);
    std::vector<double> g(2 * model.size());

    std::size_t sample = 0;
    observer(std::as_const(state), sample++);
    for (long long s = 1; s <= steps; ++s) {
        noise.fill(g);
        try {
            stepper.step(state.vector(), schedule.dt, g, s);
        } catch (const BlowUpError&) {
            throw BlowUpError(s, t0 + static_cast<double>(s - 1) * schedule.dt);
        }
        state.set_time(t0 + static_cast<double>(s) * schedule.dt);
        if (s % static_cast<long long>(schedule.sample_stride) == 0) observer(std::as_const(state), sample++);
    }
    return 2 * steps;
}

inline TrajectoryRecord simulate_trajectory(const ChainState& initial, double alpha, const BathMap& baths,
                                            const SimulationSchedule& schedule) {
    TrajectoryRecord rec;
    rec.schedule = schedule;
    rec.alpha = alpha;
    rec.times.reserve(schedule.sample_count());
    rec.states.reserve(schedule.sample_count());
    LangevinModel model(alpha, baths);
    rec.force_evaluations = simulate_trajectory(initial, model, schedule, [&](const ChainState& s, std::size_t) {
        rec.times.push_back(s.time());
        rec.states.push_back(s.vector());
    });
    return rec;
}

} // namespace ionheat
