#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ionheat {

enum class Axis : int { x = 0, y = 1 };

using Vec2 = std::array<double, 2>;

/// Flat 4N vector ordered (qx_1..qx_N, qy_1..qy_N, px_1..px_N, py_1..py_N).
using StateVector = std::vector<double>;

/// Dimensionless positions and momenta of an N-ion planar chain.
///
/// Storage is the integrator's StateVector layout, so a ChainState and a
/// StateVector convert into each other without reordering.
class ChainState {
public:
    ChainState() = default;
    explicit ChainState(std::size_t n_ions) : y_(4 * n_ions, 0.0) {}
    ChainState(StateVector y, double time) : y_(std::move(y)), time_(time) {
        if (y_.size() % 4 != 0)
            throw std::invalid_argument("state vector length must be a multiple of 4");
    }

    std::size_t size() const { return y_.size() / 4; }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    double& q(Axis a, std::size_t n) { return y_[slot(0, a) + n]; }
    double q(Axis a, std::size_t n) const { return y_[slot(0, a) + n]; }
    double& p(Axis a, std::size_t n) { return y_[slot(1, a) + n]; }
    double p(Axis a, std::size_t n) const { return y_[slot(1, a) + n]; }

    Vec2 position(std::size_t n) const { return {q(Axis::x, n), q(Axis::y, n)}; }
    Vec2 momentum(std::size_t n) const { return {p(Axis::x, n), p(Axis::y, n)}; }

    std::span<const double> qx() const { return block(0); }
    std::span<const double> qy() const { return block(1); }
    std::span<const double> px() const { return block(2); }
    std::span<const double> py() const { return block(3); }

    const StateVector& vector() const { return y_; }
    StateVector& vector() { return y_; }

    bool all_finite() const {
        for (double v : y_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend bool operator==(const ChainState&, const ChainState&) = default;

private:
    std::size_t slot(int kind, Axis a) const {
        return (2 * static_cast<std::size_t>(kind) + static_cast<std::size_t>(a)) * size();
    }
    std::span<const double> block(std::size_t b) const {
        return {y_.data() + b * size(), size()};
    }

    StateVector y_;
    double time_ = 0.0;
};

inline StateVector to_state_vector(const ChainState& s) { return s.vector(); }
inline ChainState from_state_vector(StateVector y, double time = 0.0) {
    return ChainState(std::move(y), time);
}

/// Positions-only view over a state vector's first 2N entries.
struct Positions {
    std::span<const double> x;
    std::span<const double> y;

    std::size_t size() const { return x.size(); }

    static Positions of(const ChainState& s) { return {s.qx(), s.qy()}; }
    static Positions of(std::span<const double> state_vector) {
        const std::size_t n = state_vector.size() / 4;
        return {state_vector.subspan(0, n), state_vector.subspan(n, n)};
    }
};

} // namespace ionheat
