#pragma once

// Experiment presets: temperature profiles across the structural
// transition, axial flux versus aspect ratio, motion spectra of the
// central ion, and the static phase diagram.

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <optional>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ionheat/harness/config.hpp"
#include "ionheat/harness/ensemble.hpp"
#include "ionheat/harness/output.hpp"
#include "ionheat/spectra.hpp"
#include "ionheat/statics.hpp"

namespace ionheat {

inline std::string alpha_tag(double alpha) {
    std::ostringstream os;
    os << alpha;
    return os.str();
}

inline ExperimentConfig with_alpha(ExperimentConfig c, double alpha) {
    c.chain.aspect_ratio = alpha;
    return c;
}

/// Ions n = 4 .. N-3 (zero-based 3 .. N-4) carry no beam in the default layout.
struct InnerRange {
    std::size_t first;
    std::size_t last;
};

inline InnerRange inner_ions(std::size_t n_ions) {
    if (n_ions < 9) throw DomainError("inner-ion profile needs at least 9 ions");
    return {3, n_ions - 4};
}

struct ProfileReport {
    double alpha = 0.0;
    ExperimentConfig config;
    EnsembleResult result;
    std::optional<ProfileTrend> trend;
};

inline std::vector<ProfileReport> preset_temperature_profile(const ExperimentConfig& base, const std::vector<double>& alphas,
                                                             const RunOptions& opt = {}) {
    std::vector<ProfileReport> out;
    for (double a : alphas) {
        ProfileReport rep;
        rep.alpha = a;
        rep.config = with_alpha(base, a);
        rep.result = run_ensemble(rep.config, opt);
        if (rep.result.statistics && base.n_ions() >= 9) {
            const auto r = inner_ions(base.n_ions());
            rep.trend = temperature_trend(rep.result.summaries, r.first, r.last);
        }
        out.push_back(std::move(rep));
    }
    return out;
}

inline void write_profile_csv(std::ostream& os, const ProfileReport& rep) {
    write_statistics_csv(os, rep.config, rep.result);
    if (rep.trend)
        os << "# inner_trend slope " << rep.trend->slope.mean << " se " << rep.trend->slope.std_error << " t "
           << rep.trend->t_statistic << " spearman " << rep.trend->spearman << "\n";
}

struct FluxRow {
    double alpha = 0.0;
    Estimate direct;
    Estimate novikov;
    bool steady = false;
    std::size_t failures = 0;
};

inline std::vector<double> alpha_range(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("alpha range needs lo <= hi and a positive step");
    std::vector<double> v;
    for (std::size_t k = 0;; ++k) {
        const double a = lo + static_cast<double>(k) * step;
        if (a > hi + 1e-9 * std::max(1.0, std::abs(hi))) break;
        v.push_back(a);
    }
    return v;
}

inline std::vector<FluxRow> preset_flux_sweep(const ExperimentConfig& base, const std::vector<double>& alphas,
                                              const RunOptions& opt = {}) {
    std::vector<FluxRow> rows;
    for (double a : alphas) {
        const auto r = run_ensemble(with_alpha(base, a), opt);
        FluxRow row;
        row.alpha = a;
        row.failures = r.failures.size();
        if (r.statistics) {
            row.direct = r.statistics->flux_direct[0];
            row.novikov = r.statistics->flux_novikov[0];
            row.steady = steady_state_check(*r.statistics).steady();
        } else {
            row.direct = row.novikov = {std::nan(""), std::nan("")};
        }
        rows.push_back(row);
    }
    return rows;
}

inline void write_flux_csv(std::ostream& os, const ExperimentConfig& base, const std::vector<FluxRow>& rows) {
    write_provenance(os, base);
    os << std::setprecision(17) << "alpha,flux_direct,flux_direct_se,flux_novikov,flux_novikov_se,steady,failed\n";
    for (const auto& r : rows)
        os << r.alpha << ',' << r.direct.mean << ',' << r.direct.std_error << ',' << r.novikov.mean << ','
           << r.novikov.std_error << ',' << (r.steady ? 1 : 0) << ',' << r.failures << '\n';
}

struct SpectrumReport {
    double alpha = 0.0;
    std::size_t ion = 0;
    Spectrum axial;
    Spectrum transverse;
    Peak axial_peak;
    Peak transverse_peak;
    double axial_entropy = 0.0;
    double transverse_entropy = 0.0;
};

/// Middle ion, zero-based; ion 15 of 30.
inline std::size_t central_ion(std::size_t n_ions) { return (n_ions - 1) / 2; }

inline SpectrumReport spectrum_from_record(const TrajectoryRecord& rec, std::size_t ion, AveragingWindow window,
                                           bool hann = false) {
    SpectrumReport rep;
    rep.alpha = rec.alpha;
    rep.ion = ion;
    rep.axial = motion_spectrum(rec, ion, Axis::x, window, hann);
    rep.transverse = motion_spectrum(rec, ion, Axis::y, window, hann);
    rep.axial_peak = dominant_peak(rep.axial);
    rep.transverse_peak = dominant_peak(rep.transverse);
    rep.axial_entropy = spectral_entropy(rep.axial);
    rep.transverse_entropy = spectral_entropy(rep.transverse);
    return rep;
}

/// Records trajectory 0 of the ensemble at the given sampling interval.
inline TrajectoryRecord record_trajectory(const ExperimentConfig& config, double sample_interval) {
    config.validate();
    const auto seeds = trajectory_seeds(config.master_seed(), 0);
    const auto linear = relax_linear_chain(config.n_ions());
    SimulationSchedule s = config.schedule;
    s.seed = seeds.noise;
    s.sample_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample_interval / s.dt)));
    return simulate_trajectory(initial_conditions(linear, config.jitter, seeds.jitter), config.alpha(),
                               config.bath_map(), s);
}

inline std::vector<SpectrumReport> preset_spectrum(const ExperimentConfig& base, const std::vector<double>& alphas,
                                                   double sample_interval = 0.1, bool hann = false) {
    std::vector<SpectrumReport> out;
    for (double a : alphas) {
        const auto cfg = with_alpha(base, a);
        const auto rec = record_trajectory(cfg, sample_interval);
        out.push_back(spectrum_from_record(rec, central_ion(cfg.n_ions()), cfg.window, hann));
    }
    return out;
}

struct StaticsRow {
    double alpha = 0.0;
    EquilibriumConfiguration equilibrium;
};

struct StaticsReport {
    std::size_t n_ions = 0;
    double half_length = 0.0;          // of the relaxed linear chain
    double critical_alpha_center = 0.0;
    std::vector<StaticsRow> rows;
    std::optional<double> flip_upper;  // last linear alpha of the downward sweep
    std::optional<double> flip_lower;  // first zigzag alpha
};

/// Relaxes the chain at each alpha, taken in decreasing order, and brackets the first linear-to-zigzag flip.
inline StaticsReport preset_statics(std::size_t n_ions, std::vector<double> alphas) {
    StaticsReport rep;
    rep.n_ions = n_ions;
    const auto linear = relax_linear_chain(n_ions);
    rep.half_length = linear.half_length();
    if (n_ions >= 2) rep.critical_alpha_center = critical_alpha(0.0, n_ions, rep.half_length);
    std::sort(alphas.begin(), alphas.end(), std::greater<>());
    std::optional<double> last_linear;
    for (double a : alphas) {
        auto eq = relax_equilibrium(n_ions, a);
        if (eq.phase == Phase::linear) last_linear = a;
        else if (!rep.flip_lower && last_linear) {
            rep.flip_lower = a;
            rep.flip_upper = last_linear;
        }
        rep.rows.push_back({a, std::move(eq)});
    }
    return rep;
}

inline void write_statics_csv(std::ostream& os, const StaticsReport& rep) {
    os << std::setprecision(12) << "# n_ions " << rep.n_ions << "\n"
       << "# half_length " << rep.half_length << "\n"
       << "# critical_alpha_center_analytic " << rep.critical_alpha_center << "\n";
    if (rep.flip_lower) os << "# flip_bracket " << *rep.flip_lower << " " << *rep.flip_upper << "\n";
    os << "alpha,phase,transverse_amplitude,half_length,energy,residual\n";
    for (const auto& r : rep.rows)
        os << r.alpha << ',' << to_string(r.equilibrium.phase) << ',' << r.equilibrium.transverse_amplitude << ','
           << r.equilibrium.half_length() << ',' << r.equilibrium.energy << ',' << r.equilibrium.residual_force_norm
           << '\n';
}

} // namespace ionheat
