#pragma once

// Steady-state observables of a thermostatted chain.
//
// Each trajectory accumulates window means of the raw moments
// (<p^2>, <q>, <p^2 q>, pair-current inflow, instantaneous total flux);
// every estimator is then a linear function of those means combined with
// the bath coefficients. Standard errors come from the spread of the
// per-trajectory values (or of per-batch values when only one trajectory
// is available).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ionheat/errors.hpp"
#include "ionheat/potential.hpp"
#include "ionheat/state.hpp"
#include "ionheat/thermostat.hpp"

namespace ionheat {

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    friend bool operator==(const Estimate&, const Estimate&) = default;
};

/// Closed time interval used for averaging, in dimensionless time.
struct AveragingWindow {
    double start = 0.0;
    double end = 0.0;

    bool contains(double t) const { return t >= start && t <= end; }
    double length() const { return end - start; }

    /// Last `fraction` of [0, t_end]; 3/13 mirrors averaging over 10-13 ms of a 13 ms run.
    static AveragingWindow final_fraction(double t_end, double fraction = 3.0 / 13.0) {
        return {t_end * (1.0 - fraction), t_end};
    }
    friend bool operator==(const AveragingWindow&, const AveragingWindow&) = default;
};

/// Per-sample quantities that need the O(N^2) pair sweep.
struct InstantObservables {
    std::vector<double> local_energy;  // h_n
    std::vector<double> pair_inflow;   // sum_{l != n} j_{n,l}
    Vec2 flux{};                       // total heat flux, convective + conductive
};

/// Total heat flux
///   J = sum_n h_n p_n + sum_{n} sum_{l<n} (q_n - q_l) j_{n,l}
/// with ions taken in fixed label order.
inline InstantObservables instant_observables(const ChainState& s, double alpha) {
    const std::size_t n = s.size();
    InstantObservables o;
    o.local_energy.assign(n, 0.0);
    o.pair_inflow.assign(n, 0.0);
    auto& h = o.local_energy;
    for (std::size_t i = 0; i < n; ++i) {
        const double px = s.p(Axis::x, i), py = s.p(Axis::y, i);
        h[i] = 0.5 * (px * px + py * py) + trap_energy(s.q(Axis::x, i), s.q(Axis::y, i), alpha);
    }
    Vec2 conductive{};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < i; ++l) {
            const double dx = s.q(Axis::x, i) - s.q(Axis::x, l);
            const double dy = s.q(Axis::y, i) - s.q(Axis::y, l);
            const double r2 = detail::checked_distance2(dx, dy, i, l);
            const double r = std::sqrt(r2);
            h[i] += 0.5 / r;
            h[l] += 0.5 / r;
            const double j = 0.5 / (r2 * r)
                             * (dx * (s.p(Axis::x, i) + s.p(Axis::x, l)) + dy * (s.p(Axis::y, i) + s.p(Axis::y, l)));
            o.pair_inflow[i] += j;
            o.pair_inflow[l] -= j;
            conductive[0] += dx * j;
            conductive[1] += dy * j;
        }
    for (std::size_t i = 0; i < n; ++i) {
        o.flux[0] += h[i] * s.p(Axis::x, i);
        o.flux[1] += h[i] * s.p(Axis::y, i);
    }
    o.flux[0] += conductive[0];
    o.flux[1] += conductive[1];
    return o;
}

inline Vec2 total_heat_flux_instant(const ChainState& s, double alpha) {
    return instant_observables(s, alpha).flux;
}

/// Instantaneous bath current sum_mu p (-eta p + noise); its mean is
/// evaluated with the Novikov closure, so only the drift part is exposed here.
inline double bath_friction_power(const ChainState& s, const BathMap& baths, std::size_t n) {
    double j = 0.0;
    for (Axis a : {Axis::x, Axis::y}) j -= baths.eta(n, a) * s.p(a, n) * s.p(a, n);
    return j;
}

/// Window means of the raw moments for one batch of samples.
struct ObservableMeans {
    std::size_t count = 0;
    std::vector<double> p2;           // [axis][ion]          <p_{mu,n}^2>
    std::vector<double> q;            // [axis][ion]          <q_{mu,n}>
    std::vector<double> p2q;          // [p axis][q axis][ion] <p_{mu,n}^2 q_{nu,n}>
    std::vector<double> pair_inflow;  // [ion]
    Vec2 flux{};                      // <J(t)>

    explicit ObservableMeans(std::size_t n_ions = 0)
        : p2(2 * n_ions, 0.0), q(2 * n_ions, 0.0), p2q(4 * n_ions, 0.0), pair_inflow(n_ions, 0.0) {}

    std::size_t size() const { return pair_inflow.size(); }
    double p2_of(std::size_t n, Axis a) const { return p2[static_cast<std::size_t>(a) * size() + n]; }
    double q_of(std::size_t n, Axis a) const { return q[static_cast<std::size_t>(a) * size() + n]; }
    double p2q_of(std::size_t n, Axis p_axis, Axis q_axis) const {
        return p2q[(2 * static_cast<std::size_t>(p_axis) + static_cast<std::size_t>(q_axis)) * size() + n];
    }

    /// Count-weighted combination.
    static ObservableMeans combine(std::span<const ObservableMeans> parts) {
        if (parts.empty()) return ObservableMeans{};
        ObservableMeans out(parts.front().size());
        for (const auto& b : parts) out.count += b.count;
        if (out.count == 0) return out;
        auto add = [&](std::vector<double>& dst, const std::vector<double>& src, double w) {
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w * src[i];
        };
        for (const auto& b : parts) {
            const double w = static_cast<double>(b.count) / static_cast<double>(out.count);
            add(out.p2, b.p2, w);
            add(out.q, b.q, w);
            add(out.p2q, b.p2q, w);
            add(out.pair_inflow, b.pair_inflow, w);
            out.flux[0] += w * b.flux[0];
            out.flux[1] += w * b.flux[1];
        }
        return out;
    }

    friend bool operator==(const ObservableMeans&, const ObservableMeans&) = default;
};

/// Everything a single trajectory contributes to the ensemble statistics.
struct TrajectorySummary {
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    std::vector<ObservableMeans> batches;

    ObservableMeans means() const { return ObservableMeans::combine(batches); }
    std::size_t sample_count() const {
        std::size_t c = 0;
        for (const auto& b : batches) c += b.count;
        return c;
    }
    friend bool operator==(const TrajectorySummary&, const TrajectorySummary&) = default;
};

/// Online accumulation of ObservableMeans over an averaging window,
/// split into equal-duration batches.
class WindowAccumulator {
public:
    WindowAccumulator(std::size_t n_ions, double alpha, AveragingWindow window, std::size_t batches = 1)
        : n_(n_ions), alpha_(alpha), window_(window), sums_(std::max<std::size_t>(batches, 1), ObservableMeans(n_ions)) {
        if (!(window.end > window.start)) throw InvalidParameter("averaging window must have positive length");
    }

    void observe(const ChainState& s) {
        if (!window_.contains(s.time())) return;
        auto& b = sums_[batch_of(s.time())];
        const auto inst = instant_observables(s, alpha_);
        ++b.count;
        for (std::size_t i = 0; i < n_; ++i) {
            const double qa[2] = {s.q(Axis::x, i), s.q(Axis::y, i)};
            const double pa[2] = {s.p(Axis::x, i), s.p(Axis::y, i)};
            for (std::size_t a = 0; a < 2; ++a) {
                const double p2 = pa[a] * pa[a];
                b.p2[a * n_ + i] += p2;
                b.q[a * n_ + i] += qa[a];
                b.p2q[(2 * a + 0) * n_ + i] += p2 * qa[0];
                b.p2q[(2 * a + 1) * n_ + i] += p2 * qa[1];
            }
            b.pair_inflow[i] += inst.pair_inflow[i];
        }
        b.flux[0] += inst.flux[0];
        b.flux[1] += inst.flux[1];
    }

    TrajectorySummary finish(std::uint64_t index = 0, std::uint64_t seed = 0) const {
        TrajectorySummary t{index, seed, {}};
        for (const auto& s : sums_) {
            ObservableMeans m = s;
            if (m.count > 0) {
                const double inv = 1.0 / static_cast<double>(m.count);
                for (auto* v : {&m.p2, &m.q, &m.p2q, &m.pair_inflow})
                    for (double& x : *v) x *= inv;
                m.flux[0] *= inv;
                m.flux[1] *= inv;
            }
            t.batches.push_back(std::move(m));
        }
        return t;
    }

    const AveragingWindow& window() const { return window_; }

private:
    std::size_t batch_of(double t) const {
        const double u = (t - window_.start) / window_.length();
        const auto b = static_cast<std::size_t>(u * static_cast<double>(sums_.size()));
        return std::min(b, sums_.size() - 1);
    }

    std::size_t n_;
    double alpha_;
    AveragingWindow window_;
    std::vector<ObservableMeans> sums_;
};

/// Mean and standard error of a list of independent values.
inline Estimate mean_and_stderr(std::span<const double> values) {
    if (values.empty()) throw EmptyWindowError("no samples to average");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// The independent units behind every error bar: one per trajectory, or the
/// batches of the only trajectory.
inline std::vector<ObservableMeans> statistical_units(std::span<const TrajectorySummary> ensemble) {
    std::vector<ObservableMeans> units;
    if (ensemble.size() == 1) {
        for (const auto& b : ensemble.front().batches)
            if (b.count > 0) units.push_back(b);
    } else {
        for (const auto& t : ensemble) {
            auto m = t.means();
            if (m.count > 0) units.push_back(std::move(m));
        }
    }
    if (units.empty()) throw EmptyWindowError("averaging window holds no samples");
    return units;
}

template <class F>
Estimate estimate_over(std::span<const ObservableMeans> units, F&& f) {
    std::vector<double> v;
    v.reserve(units.size());
    for (const auto& u : units) v.push_back(f(u));
    return mean_and_stderr(v);
}

/// T_n = 1/2 sum_mu <p_{mu,n}^2>.
inline std::vector<Estimate> local_temperatures(std::span<const TrajectorySummary> ensemble) {
    const auto units = statistical_units(ensemble);
    std::vector<Estimate> t(units.front().size());
    for (std::size_t n = 0; n < t.size(); ++n)
        t[n] = estimate_over(units, [n](const ObservableMeans& m) {
            return 0.5 * (m.p2_of(n, Axis::x) + m.p2_of(n, Axis::y));
        });
    return t;
}

inline double bath_current_from(const ObservableMeans& m, const BathMap& baths, std::size_t n) {
    double j = 0.0;
    for (Axis a : {Axis::x, Axis::y}) j += -baths.eta(n, a) * m.p2_of(n, a) + baths.diffusion(n, a);
    return j;
}

/// <j_{B,n}> = sum_mu (-eta <p^2> + D).
inline Estimate bath_current_mean(std::span<const TrajectorySummary> ensemble, const BathMap& baths, std::size_t n) {
    if (n >= baths.size()) throw std::out_of_range("ion index out of range");
    const auto units = statistical_units(ensemble);
    return estimate_over(units, [&](const ObservableMeans& m) { return bath_current_from(m, baths, n); });
}

/// r_n = sum_{l<n} <j_{n,l}> + <j_{B,n}> - sum_{l>n} <j_{l,n}>; zero in a steady state.
inline std::vector<Estimate> balance_residuals(std::span<const TrajectorySummary> ensemble, const BathMap& baths) {
    const auto units = statistical_units(ensemble);
    std::vector<Estimate> r(units.front().size());
    for (std::size_t n = 0; n < r.size(); ++n)
        r[n] = estimate_over(units, [&](const ObservableMeans& m) {
            return m.pair_inflow[n] + bath_current_from(m, baths, n);
        });
    return r;
}

inline Vec2 novikov_flux_from(const ObservableMeans& m, const BathMap& baths) {
    Vec2 j{};
    for (std::size_t n = 0; n < m.size(); ++n)
        for (Axis mu : {Axis::x, Axis::y}) {
            const double eta = baths.eta(n, mu);
            const double d = baths.diffusion(n, mu);
            if (eta == 0.0 && d == 0.0) continue;
            j[0] += eta * m.p2q_of(n, mu, Axis::x) - d * m.q_of(n, Axis::x);
            j[1] += eta * m.p2q_of(n, mu, Axis::y) - d * m.q_of(n, Axis::y);
        }
    return j;
}

/// <J> = sum_{n,mu} (eta <p_{mu,n}^2 q_n> - D <q_n>).
inline std::array<Estimate, 2> novikov_total_flux(std::span<const TrajectorySummary> ensemble, const BathMap& baths) {
    const auto units = statistical_units(ensemble);
    std::array<Estimate, 2> out;
    for (std::size_t c = 0; c < 2; ++c)
        out[c] = estimate_over(units, [&](const ObservableMeans& m) { return novikov_flux_from(m, baths)[c]; });
    return out;
}

/// Window average of the instantaneous total flux.
inline std::array<Estimate, 2> direct_total_flux(std::span<const TrajectorySummary> ensemble) {
    const auto units = statistical_units(ensemble);
    std::array<Estimate, 2> out;
    for (std::size_t c = 0; c < 2; ++c)
        out[c] = estimate_over(units, [c](const ObservableMeans& m) { return m.flux[c]; });
    return out;
}

/// Mean and standard error of sampled series over a window. `series[k]` is
/// trajectory k sampled at `times`. With two or more trajectories the error
/// comes from per-trajectory means; a single series is split into
/// `batches` contiguous blocks instead.
inline Estimate window_average(std::span<const std::vector<double>> series, std::span<const double> times,
                               AveragingWindow window, std::size_t batches = 10) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (window.contains(times[i])) idx.push_back(i);
    if (idx.empty() || series.empty()) throw EmptyWindowError("averaging window holds no samples");
    std::vector<double> units;
    if (series.size() >= 2) {
        for (const auto& s : series) {
            double acc = 0.0;
            for (auto i : idx) acc += s[i];
            units.push_back(acc / static_cast<double>(idx.size()));
        }
        return mean_and_stderr(units);
    }
    const auto& s = series.front();
    const std::size_t b = std::clamp<std::size_t>(batches, 1, idx.size());
    double total = 0.0;
    for (auto i : idx) total += s[i];
    for (std::size_t k = 0; k < b; ++k) {
        const std::size_t lo = k * idx.size() / b, hi = (k + 1) * idx.size() / b;
        double acc = 0.0;
        for (std::size_t j = lo; j < hi; ++j) acc += s[idx[j]];
        units.push_back(acc / static_cast<double>(hi - lo));
    }
    Estimate e = mean_and_stderr(units);
    e.mean = total / static_cast<double>(idx.size());
    return e;
}

struct EnsembleStatistics {
    AveragingWindow window;
    std::size_t trajectories = 0;
    std::size_t samples = 0;  // summed over trajectories
    std::vector<Estimate> temperature;
    std::vector<Estimate> mean_x;
    std::vector<Estimate> mean_y;
    std::vector<Estimate> bath_current;
    std::vector<Estimate> residual;
    std::array<Estimate, 2> flux_direct{};
    std::array<Estimate, 2> flux_novikov{};
    /// Mean transverse positions split by zigzag branch (+1 / -1).
    std::vector<double> mean_y_upper, mean_y_lower;
    std::size_t upper_count = 0, lower_count = 0;

    friend bool operator==(const EnsembleStatistics&, const EnsembleStatistics&) = default;
};

/// Sign of the zigzag order parameter sum_n (-1)^n <y_n>, or 0 below threshold.
inline int zigzag_branch(const ObservableMeans& m, double threshold = 1e-3) {
    double s = 0.0;
    for (std::size_t n = 0; n < m.size(); ++n) s += (n % 2 == 0 ? 1.0 : -1.0) * m.q_of(n, Axis::y);
    s /= static_cast<double>(std::max<std::size_t>(m.size(), 1));
    return s > threshold ? 1 : (s < -threshold ? -1 : 0);
}

inline EnsembleStatistics compute_statistics(std::span<const TrajectorySummary> ensemble, const BathMap& baths,
                                             AveragingWindow window) {
    EnsembleStatistics st;
    st.window = window;
    st.trajectories = ensemble.size();
    for (const auto& t : ensemble) st.samples += t.sample_count();
    const auto units = statistical_units(ensemble);
    const std::size_t n = units.front().size();
    st.temperature = local_temperatures(ensemble);
    st.mean_x.resize(n);
    st.mean_y.resize(n);
    st.bath_current.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        st.mean_x[i] = estimate_over(units, [i](const ObservableMeans& m) { return m.q_of(i, Axis::x); });
        st.mean_y[i] = estimate_over(units, [i](const ObservableMeans& m) { return m.q_of(i, Axis::y); });
        st.bath_current[i] = estimate_over(units, [&](const ObservableMeans& m) { return bath_current_from(m, baths, i); });
    }
    st.residual = balance_residuals(ensemble, baths);
    st.flux_direct = direct_total_flux(ensemble);
    st.flux_novikov = novikov_total_flux(ensemble, baths);

    st.mean_y_upper.assign(n, 0.0);
    st.mean_y_lower.assign(n, 0.0);
    for (const auto& t : ensemble) {
        const auto m = t.means();
        if (m.count == 0) continue;
        const int b = zigzag_branch(m);
        if (b == 0) continue;
        auto& dst = b > 0 ? st.mean_y_upper : st.mean_y_lower;
        (b > 0 ? st.upper_count : st.lower_count)++;
        for (std::size_t i = 0; i < n; ++i) dst[i] += m.q_of(i, Axis::y);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (st.upper_count) st.mean_y_upper[i] /= static_cast<double>(st.upper_count);
        if (st.lower_count) st.mean_y_lower[i] /= static_cast<double>(st.lower_count);
    }
    return st;
}

inline constexpr double residual_floor = 1e-6;

struct SteadyStateReport {
    bool residuals_ok = true;
    bool flux_ok = true;
    std::vector<std::size_t> failing_ions;
    double flux_discrepancy_sigma = 0.0;  // |direct - novikov| in combined standard errors (axial)

    bool steady() const { return residuals_ok && flux_ok; }
};

/// All |r_n| < max(3 se, 1e-6) and the two axial flux estimators within 3
/// combined standard errors.
inline SteadyStateReport steady_state_check(const EnsembleStatistics& st) {
    SteadyStateReport rep;
    for (std::size_t i = 0; i < st.residual.size(); ++i) {
        const auto& r = st.residual[i];
        if (!(std::abs(r.mean) < std::max(3.0 * r.std_error, residual_floor))) {
            rep.residuals_ok = false;
            rep.failing_ions.push_back(i);
        }
    }
    const auto& a = st.flux_direct[0];
    const auto& b = st.flux_novikov[0];
    const double combined = std::hypot(a.std_error, b.std_error);
    const double diff = std::abs(a.mean - b.mean);
    rep.flux_discrepancy_sigma = combined > 0.0 ? diff / combined : (diff > 0.0 ? INFINITY : 0.0);
    rep.flux_ok = diff <= std::max(3.0 * combined, residual_floor);
    return rep;
}

/// Linear trend of the temperature profile over ions [first, last].
struct ProfileTrend {
    Estimate slope;        // per ion index, error from per-trajectory slopes
    double t_statistic = 0.0;
    double spearman = 0.0; // rank correlation of the ensemble profile with ion index
};

namespace detail {
inline double ols_slope(std::span<const double> y) {
    const double n = static_cast<double>(y.size());
    const double xm = (n - 1.0) / 2.0;
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double dx = static_cast<double>(i) - xm;
        sxy += dx * (y[i] - ym);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

inline std::vector<double> ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j);
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}
} // namespace detail

inline double spearman_correlation(std::span<const double> a, std::span<const double> b) {
    const auto ra = detail::ranks(a), rb = detail::ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return (saa > 0.0 && sbb > 0.0) ? sab / std::sqrt(saa * sbb) : 0.0;
}

/// Two-sided 1% critical value of Spearman's rho (large-sample normal approximation).
inline double spearman_critical_value(std::size_t n) {
    return 2.5758293035489 / std::sqrt(static_cast<double>(n) - 1.0);
}

inline ProfileTrend temperature_trend(std::span<const TrajectorySummary> ensemble, std::size_t first, std::size_t last) {
    const auto units = statistical_units(ensemble);
    if (last < first + 2 || last >= units.front().size()) throw std::invalid_argument("trend needs at least three ions");
    std::vector<double> slopes;
    for (const auto& u : units) {
        std::vector<double> t;
        for (std::size_t n = first; n <= last; ++n) t.push_back(0.5 * (u.p2_of(n, Axis::x) + u.p2_of(n, Axis::y)));
        slopes.push_back(detail::ols_slope(t));
    }
    ProfileTrend tr;
    tr.slope = mean_and_stderr(slopes);
    tr.t_statistic = tr.slope.std_error > 0.0 ? tr.slope.mean / tr.slope.std_error : 0.0;
    const auto temps = local_temperatures(ensemble);
    std::vector<double> idx, prof;
    for (std::size_t n = first; n <= last; ++n) {
        idx.push_back(static_cast<double>(n));
        prof.push_back(temps[n].mean);
    }
    tr.spearman = spearman_correlation(idx, prof);
    return tr;
}

} // namespace ionheat
