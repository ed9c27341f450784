#pragma once

// Power spectra of single-ion coordinate series.
//
// Power is the one-sided periodogram |X_k|^2 / M of the mean-subtracted
// (optionally Hann-windowed) series, with interior bins doubled so that
// sum_k P_k = sum_j x_j^2. Frequencies are in cycles per unit of
// dimensionless time; the axial trap frequency sits at 1 / (2 pi).

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ionheat/errors.hpp"
#include "ionheat/integrator.hpp"
#include "ionheat/observables.hpp"
#include "ionheat/state.hpp"

namespace ionheat {

inline constexpr std::size_t min_spectrum_samples = 16;

namespace detail {
/// FFTW planning is not thread-safe.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

struct Spectrum {
    std::vector<double> frequency;
    std::vector<double> power;
    std::size_t ion = 0;
    Axis axis = Axis::x;
    std::size_t samples = 0;
    double sample_interval = 0.0;
    bool hann = false;
    bool mean_subtracted = true;

    std::size_t size() const { return power.size(); }
    double bin_width() const { return 1.0 / (static_cast<double>(samples) * sample_interval); }
};

/// One-sided power spectrum of a uniformly sampled real series.
inline Spectrum power_spectrum(std::span<const double> series, double sample_interval, bool hann = false) {
    const std::size_t m = series.size();
    if (m < min_spectrum_samples) throw DomainError("spectrum needs at least 16 samples");
    if (!(sample_interval > 0.0)) throw DomainError("sample interval must be positive");

    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(m);
    std::vector<double> in(m);
    for (std::size_t j = 0; j < m; ++j) {
        double w = 1.0;
        if (hann) w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
        in[j] = w * (series[j] - mean);
    }
    const std::size_t bins = m / 2 + 1;
    std::vector<std::complex<double>> out(bins);
    {
        fftw_plan plan;
        {
            std::lock_guard lock(detail::fftw_planner_mutex());
            // FFTW_ESTIMATE leaves the input untouched while planning.
            plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(),
                                        reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
        }
        fftw_execute(plan);
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    Spectrum s;
    s.samples = m;
    s.sample_interval = sample_interval;
    s.hann = hann;
    s.frequency.resize(bins);
    s.power.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const bool edge = k == 0 || (m % 2 == 0 && k == m / 2);
        s.frequency[k] = static_cast<double>(k) / (static_cast<double>(m) * sample_interval);
        s.power[k] = (edge ? 1.0 : 2.0) * std::norm(out[k]) / static_cast<double>(m);
    }
    return s;
}

/// Spectrum of coordinate `axis` of ion `ion` over the samples of `record`
/// that fall inside `window`.
inline Spectrum motion_spectrum(const TrajectoryRecord& record, std::size_t ion, Axis axis, AveragingWindow window,
                                bool hann = false) {
    std::vector<double> series, times;
    for (std::size_t i = 0; i < record.size(); ++i) {
        if (!window.contains(record.times[i])) continue;
        const auto& y = record.states[i];
        const std::size_t n = y.size() / 4;
        if (ion >= n) throw std::out_of_range("ion index out of range");
        series.push_back(y[static_cast<std::size_t>(axis) * n + ion]);
        times.push_back(record.times[i]);
    }
    if (series.size() < min_spectrum_samples) throw DomainError("spectrum window holds fewer than 16 samples");
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-6 * dt) throw DomainError("samples are not uniformly spaced");
    Spectrum s = power_spectrum(series, dt, hann);
    s.ion = ion;
    s.axis = axis;
    return s;
}

struct Peak {
    double frequency = 0.0;
    double power = 0.0;
    std::size_t bin = 0;
};

/// Largest bin above zero frequency; ties go to the lower frequency.
inline Peak dominant_peak(const Spectrum& s) {
    if (s.size() < 2) throw DomainError("spectrum has no non-zero frequency bin");
    Peak p{s.frequency[1], s.power[1], 1};
    for (std::size_t k = 2; k < s.size(); ++k)
        if (s.power[k] > p.power) p = {s.frequency[k], s.power[k], k};
    return p;
}

/// Shannon entropy (nats) of the normalized power distribution.
inline double spectral_entropy(const Spectrum& s) {
    double total = 0.0;
    for (double p : s.power) total += p;
    if (!(total > 0.0)) throw DomainError("spectrum carries no power");
    double h = 0.0;
    for (double p : s.power)
        if (p > 0.0) {
            const double w = p / total;
            h -= w * std::log(w);
        }
    return h;
}

inline void write_spectrum(std::ostream& os, const Spectrum& s) {
    os << "# ion " << s.ion + 1 << "\n"
       << "# axis " << (s.axis == Axis::x ? "x" : "y") << "\n"
       << "# samples " << s.samples << "\n"
       << std::setprecision(17) << "# sample_interval " << s.sample_interval << "\n"
       << "# window " << (s.hann ? "hann" : "rectangular") << "\n"
       << "# mean_subtracted " << (s.mean_subtracted ? 1 : 0) << "\n"
       << "# frequency power\n";
    for (std::size_t k = 0; k < s.size(); ++k) os << s.frequency[k] << ' ' << s.power[k] << '\n';
}

inline Spectrum read_spectrum(std::istream& is) {
    Spectrum s;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == '#') {
            std::string hash, key, value;
            ls >> hash >> key >> value;
            if (key == "ion") s.ion = std::stoul(value) - 1;
            else if (key == "axis") s.axis = value == "y" ? Axis::y : Axis::x;
            else if (key == "samples") s.samples = std::stoul(value);
            else if (key == "sample_interval") s.sample_interval = std::stod(value);
            else if (key == "window") s.hann = value == "hann";
            else if (key == "mean_subtracted") s.mean_subtracted = value == "1";
            continue;
        }
        double f = 0.0, p = 0.0;
        if (!(ls >> f >> p)) throw DomainError("malformed spectrum line: " + line);
        s.frequency.push_back(f);
        s.power.push_back(p);
    }
    return s;
}

} // namespace ionheat
