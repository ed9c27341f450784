#pragma once

// Experiment configuration: JSON ingestion, validation, canonical form and hash.
//
// Keys (all optional except where noted):
//   preset               free-form label echoed into outputs
//   n_ions               chain length
//   ion                  { mass_number | mass_u, charge_number }
//   trap                 { axial_frequency_hz, aspect_ratio }
//   transition           { frequency_hz, linewidth_hz }
//   beams                "default" or [{ ions: [1-based], axes: ["x","y"], intensity, detuning }]
//   schedule             { dt | dt_s, t_end | t_end_s, sample_stride }   (SI wins when both given)
//   ensemble             { trajectories, seed, jitter, batches }
//   window               { start | start_s, end | end_s } or { final_fraction }

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ionheat/errors.hpp"
#include "ionheat/integrator.hpp"
#include "ionheat/observables.hpp"
#include "ionheat/statics.hpp"
#include "ionheat/thermostat.hpp"
#include "ionheat/units.hpp"

namespace ionheat {

struct BeamGroup {
    std::vector<std::size_t> ions;  // 1-based
    std::vector<Axis> axes{Axis::x, Axis::y};
    double intensity = 0.08;
    double detuning = -0.02;
    friend bool operator==(const BeamGroup&, const BeamGroup&) = default;
};

/// Trap and species inputs as written in a configuration file.
struct ChainSetup {
    std::size_t n_ions = 10;
    double mass_u = 24.0;
    int charge_number = 1;
    double axial_frequency_hz = 50.0e3;
    double aspect_ratio = 13.0;
    double transition_frequency_hz = 1069.0e12;
    double linewidth_hz = 41.296e6;

    PhysicalParameters physical() const {
        PhysicalParameters p;
        p.n_ions = n_ions;
        p.ion_mass = mass_u * constants::atomic_mass_unit;
        p.ion_charge = charge_number * constants::elementary_charge;
        p.axial_freq = two_pi * axial_frequency_hz;
        p.aspect_ratio = aspect_ratio;
        p.transition_freq = two_pi * transition_frequency_hz;
        p.linewidth = two_pi * linewidth_hz;
        return p;
    }
    friend bool operator==(const ChainSetup&, const ChainSetup&) = default;
};

struct ExperimentConfig {
    std::string preset = "desk";
    ChainSetup chain;
    std::vector<BeamGroup> beams;
    SimulationSchedule schedule{default_time_step, 1000.0, 100, 1};
    std::size_t trajectories = 100;
    double jitter = default_jitter;
    std::size_t batches = 1;
    AveragingWindow window = AveragingWindow::final_fraction(1000.0, 0.3);

    std::uint64_t master_seed() const { return schedule.seed; }
    double alpha() const { return chain.aspect_ratio; }
    std::size_t n_ions() const { return chain.n_ions; }
    PhysicalParameters params() const { return chain.physical(); }

    std::vector<LaserBeam> laser_beams() const {
        std::vector<LaserBeam> out;
        for (const auto& g : beams)
            for (std::size_t ion : g.ions)
                for (Axis a : g.axes) out.push_back({ion - 1, a, g.intensity, g.detuning});
        return out;
    }

    BathMap bath_map() const { return build_bath_map(laser_beams(), params()); }

    void validate() const {
        params().validate();
        schedule.validate();
        if (trajectories < 1) throw ConfigError("ensemble needs at least one trajectory");
        if (!(jitter >= 0.0)) throw ConfigError("jitter must be non-negative");
        if (!(window.start >= 0.0) || !(window.end > window.start) || window.end > schedule.t_end * (1.0 + 1e-12))
            throw ConfigError("averaging window must lie inside [0, t_end] with positive length");
        for (const auto& g : beams) {
            if (!(g.intensity >= 0.0)) throw ConfigError("beam intensity must be non-negative");
            for (std::size_t ion : g.ions)
                if (ion < 1 || ion > chain.n_ions) throw ConfigError("beam targets ion " + std::to_string(ion) + " outside the chain");
        }
    }

    friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
        return a.preset == b.preset && a.chain == b.chain && a.beams == b.beams && a.schedule.dt == b.schedule.dt
               && a.schedule.t_end == b.schedule.t_end && a.schedule.sample_stride == b.schedule.sample_stride
               && a.schedule.seed == b.schedule.seed && a.trajectories == b.trajectories && a.jitter == b.jitter
               && a.batches == b.batches && a.window == b.window;
    }
};

/// The three leftmost ions see the hot beam (detuning -0.02), the three
/// rightmost the cold one (-0.1); I/I0 = 0.08 on both axes.
inline std::vector<BeamGroup> default_beam_groups(std::size_t n_ions, double detuning_left = -0.02,
                                                  double detuning_right = -0.1, double intensity = 0.08) {
    BeamGroup left, right;
    for (std::size_t i = 1; i <= std::min<std::size_t>(3, n_ions); ++i) left.ions.push_back(i);
    for (std::size_t i = n_ions - std::min<std::size_t>(3, n_ions) + 1; i <= n_ions; ++i) right.ions.push_back(i);
    left.intensity = right.intensity = intensity;
    left.detuning = detuning_left;
    right.detuning = detuning_right;
    return {left, right};
}

/// N = 10, 100 trajectories, t_end = 1000, averaging over the last 30 %.
inline ExperimentConfig desk_preset(double alpha = 13.0) {
    ExperimentConfig c;
    c.preset = "desk";
    c.chain.n_ions = 10;
    c.chain.aspect_ratio = alpha;
    c.beams = default_beam_groups(10);
    c.schedule = {default_time_step, 1000.0, 100, 1};
    c.trajectories = 100;
    c.window = AveragingWindow::final_fraction(1000.0, 0.3);
    return c;
}

/// N = 30, 500 trajectories, 13 ms with averaging over 10-13 ms.
inline ExperimentConfig paper_preset(double alpha = 13.0) {
    ExperimentConfig c;
    c.preset = "paper";
    c.chain.n_ions = 30;
    c.chain.aspect_ratio = alpha;
    c.beams = default_beam_groups(30);
    const double t_end = nondimensionalize(c.params(), 13e-3, QuantityRole::time);
    c.schedule = {default_time_step, t_end, 1000, 1};
    c.trajectories = 500;
    c.window = {nondimensionalize(c.params(), 10e-3, QuantityRole::time), t_end};
    return c;
}

namespace detail {
inline Axis parse_axis(const std::string& s) {
    if (s == "x") return Axis::x;
    if (s == "y") return Axis::y;
    throw ConfigError("unknown axis '" + s + "'");
}
} // namespace detail

/// Parses a configuration document on top of the desk-scale defaults.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using nlohmann::json;
    ExperimentConfig c = desk_preset();
    try {
        if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
        c.preset = j.value("preset", c.preset);
        if (j.contains("n_ions")) c.chain.n_ions = j.at("n_ions").get<std::size_t>();
        if (j.contains("ion")) {
            const auto& ion = j.at("ion");
            c.chain.mass_u = ion.value("mass_u", ion.value("mass_number", c.chain.mass_u));
            c.chain.charge_number = ion.value("charge_number", c.chain.charge_number);
        }
        if (j.contains("trap")) {
            const auto& t = j.at("trap");
            c.chain.axial_frequency_hz = t.value("axial_frequency_hz", c.chain.axial_frequency_hz);
            c.chain.aspect_ratio = t.value("aspect_ratio", c.chain.aspect_ratio);
        }
        if (j.contains("transition")) {
            const auto& t = j.at("transition");
            c.chain.transition_frequency_hz = t.value("frequency_hz", c.chain.transition_frequency_hz);
            c.chain.linewidth_hz = t.value("linewidth_hz", c.chain.linewidth_hz);
        }
        c.params().validate();

        c.beams = default_beam_groups(c.chain.n_ions);
        if (j.contains("beams")) {
            const auto& b = j.at("beams");
            if (b.is_string()) {
                if (b.get<std::string>() != "default") throw ConfigError("beams must be \"default\" or a list");
            } else {
                c.beams.clear();
                for (const auto& g : b) {
                    BeamGroup bg;
                    bg.ions = g.at("ions").get<std::vector<std::size_t>>();
                    if (g.contains("axes")) {
                        bg.axes.clear();
                        for (const auto& a : g.at("axes")) bg.axes.push_back(detail::parse_axis(a.get<std::string>()));
                    }
                    bg.intensity = g.at("intensity").get<double>();
                    bg.detuning = g.at("detuning").get<double>();
                    c.beams.push_back(std::move(bg));
                }
            }
        }

        auto to_time = [&](double seconds) { return nondimensionalize(c.params(), seconds, QuantityRole::time); };
        if (j.contains("schedule")) {
            const auto& s = j.at("schedule");
            if (s.contains("dt")) c.schedule.dt = s.at("dt").get<double>();
            if (s.contains("dt_s")) c.schedule.dt = to_time(s.at("dt_s").get<double>());
            if (s.contains("t_end")) c.schedule.t_end = s.at("t_end").get<double>();
            if (s.contains("t_end_s")) c.schedule.t_end = to_time(s.at("t_end_s").get<double>());
            c.schedule.sample_stride = s.value("sample_stride", c.schedule.sample_stride);
        }
        if (j.contains("ensemble")) {
            const auto& e = j.at("ensemble");
            c.trajectories = e.value("trajectories", c.trajectories);
            c.schedule.seed = e.value("seed", c.schedule.seed);
            c.jitter = e.value("jitter", c.jitter);
            c.batches = e.value("batches", c.batches);
        }
        c.window = AveragingWindow::final_fraction(c.schedule.t_end, 0.3);
        if (j.contains("window")) {
            const auto& w = j.at("window");
            if (w.contains("final_fraction")) {
                const double f = w.at("final_fraction").get<double>();
                if (!(f > 0.0 && f <= 1.0)) throw ConfigError("final_fraction must lie in (0, 1]");
                c.window = AveragingWindow::final_fraction(c.schedule.t_end, f);
            }
            if (w.contains("start")) c.window.start = w.at("start").get<double>();
            if (w.contains("start_s")) c.window.start = to_time(w.at("start_s").get<double>());
            if (w.contains("end")) c.window.end = w.at("end").get<double>();
            if (w.contains("end_s")) c.window.end = to_time(w.at("end_s").get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    try {
        c.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

/// Fully resolved, dimensionless form; parse_config(to_json(c)) == c.
inline nlohmann::json to_json(const ExperimentConfig& c) {
    using nlohmann::json;
    json beams = json::array();
    for (const auto& g : c.beams) {
        json axes = json::array();
        for (Axis a : g.axes) axes.push_back(a == Axis::x ? "x" : "y");
        beams.push_back({{"ions", g.ions}, {"axes", axes}, {"intensity", g.intensity}, {"detuning", g.detuning}});
    }
    return {
        {"preset", c.preset},
        {"n_ions", c.chain.n_ions},
        {"ion", {{"mass_u", c.chain.mass_u}, {"charge_number", c.chain.charge_number}}},
        {"trap", {{"axial_frequency_hz", c.chain.axial_frequency_hz}, {"aspect_ratio", c.chain.aspect_ratio}}},
        {"transition", {{"frequency_hz", c.chain.transition_frequency_hz}, {"linewidth_hz", c.chain.linewidth_hz}}},
        {"beams", beams},
        {"schedule", {{"dt", c.schedule.dt}, {"t_end", c.schedule.t_end}, {"sample_stride", c.schedule.sample_stride}}},
        {"ensemble", {{"trajectories", c.trajectories}, {"seed", c.schedule.seed}, {"jitter", c.jitter}, {"batches", c.batches}}},
        {"window", {{"start", c.window.start}, {"end", c.window.end}}},
    };
}

/// FNV-1a 64 of the canonical JSON text.
inline std::uint64_t config_hash(const ExperimentConfig& c) {
    const std::string text = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

} // namespace ionheat
