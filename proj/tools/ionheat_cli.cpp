// Command-line front end: run, profile, flux-sweep, spectrum, statics, validate.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 steady-state criterion unmet (outputs are still written).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ionheat/ionheat.hpp"

namespace fs = std::filesystem;
using namespace ionheat;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_numerical = 2;
constexpr int exit_not_steady = 3;

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    std::string out = "ionheat_out";
    bool paper_scale = false;
    std::string resume;
    std::size_t checkpoint_every = 0;
    std::optional<std::size_t> stop_after;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "JSON experiment configuration");
    cmd->add_option("--seed", o.seed, "master seed (overrides the configuration)");
    cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_flag("--paper-scale", o.paper_scale, "full protocol: N = 30, 500 trajectories, 13 ms");
    cmd->add_option("--resume", o.resume, "checkpoint file (run) or directory of checkpoints (presets)");
    cmd->add_option("--checkpoint-every", o.checkpoint_every, "save a checkpoint after this many trajectories");
    cmd->add_option("--stop-after", o.stop_after, "simulate this many trajectories, checkpoint and stop");
    cmd->add_flag("--quiet", o.quiet, "no progress output");
}

ExperimentConfig base_config(const CommonOptions& o, std::optional<double> alpha = std::nullopt) {
    ExperimentConfig c;
    if (!o.config.empty()) {
        if (o.paper_scale) throw ConfigError("--paper-scale and --config are mutually exclusive");
        c = load_config(o.config);
    } else if (o.paper_scale) {
        std::cerr << "warning: full-scale protocol selected; 500 trajectories of 4e7 steps at N = 30 take months of CPU time\n";
        c = paper_preset();
    } else {
        c = desk_preset();
    }
    if (o.seed) c.schedule.seed = *o.seed;
    if (alpha) c.chain.aspect_ratio = *alpha;
    for (const auto& w : c.schedule.warnings()) std::cerr << "warning: " << w << "\n";
    c.validate();
    return c;
}

RunOptions run_options(const CommonOptions& o, const fs::path& checkpoint_path, const fs::path& resume_path) {
    RunOptions r;
    r.workers = o.workers;
    r.checkpoint_path = checkpoint_path;
    r.checkpoint_every = o.checkpoint_every;
    r.stop_after = o.stop_after;
    if (!resume_path.empty() && fs::exists(resume_path)) r.resume = checkpoint_load(resume_path);
    if (!o.quiet) {
        r.progress = [](std::size_t done, std::size_t total) {
            if (total >= 10 && done % (total / 10) != 0 && done != total) return;
            std::cerr << "  " << done << "/" << total << " trajectories\n";
        };
    }
    return r;
}

std::ofstream open_output(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write " + p.string());
    return os;
}

void save_config(const fs::path& dir, const ExperimentConfig& c) {
    auto os = open_output(dir / "config.json");
    os << to_json(c).dump(2) << "\n";
}

int steady_code(const EnsembleResult& r) {
    const auto ss = r.steady_state();
    if (ss && !ss->steady()) {
        std::cerr << "steady-state criterion unmet: balance residuals or flux estimators disagree beyond 3 sigma\n";
        return exit_not_steady;
    }
    return exit_ok;
}

int cmd_run(const CommonOptions& o, std::optional<double> alpha) {
    const auto cfg = base_config(o, alpha);
    const fs::path out(o.out);
    fs::create_directories(out);
    save_config(out, cfg);
    const fs::path ckpt = out / "checkpoint.json";
    if (!o.resume.empty() && !fs::is_regular_file(o.resume))
        throw ConfigError("checkpoint " + o.resume + " does not exist");
    const auto result = run_ensemble(cfg, run_options(o, ckpt, o.resume));
    if (!result.complete) {
        std::cerr << "stopped early; checkpoint at " << ckpt << ", continue with --resume " << ckpt << "\n";
        return exit_ok;
    }
    if (!result.statistics) {
        std::cerr << "error: every trajectory failed (" << result.failures.size() << " failures)\n";
        return exit_numerical;
    }
    auto os = open_output(out / "statistics.csv");
    write_statistics_csv(os, cfg, result);
    std::cout << "wrote " << (out / "statistics.csv").string() << "\n";
    return steady_code(result);
}

fs::path alpha_file(const fs::path& dir, const std::string& stem, double alpha, const std::string& ext) {
    return dir / (stem + "_alpha" + alpha_tag(alpha) + ext);
}

void require_resume_dir(const CommonOptions& o) {
    if (!o.resume.empty() && !fs::is_directory(o.resume))
        throw ConfigError("--resume expects the output directory of the interrupted run, got " + o.resume);
}

int cmd_profile(const CommonOptions& o, const std::vector<double>& alphas) {
    require_resume_dir(o);
    const auto base = base_config(o);
    const fs::path out(o.out);
    fs::create_directories(out);
    save_config(out, base);
    int code = exit_ok;
    std::vector<ProfileReport> reports;
    for (double a : alphas) {
        const auto cfg = with_alpha(base, a);
        const fs::path ckpt = alpha_file(out, "checkpoint", a, ".json");
        const fs::path resume = o.resume.empty() ? fs::path{} : alpha_file(o.resume, "checkpoint", a, ".json");
        if (!o.quiet) std::cerr << "alpha = " << a << "\n";
        ProfileReport rep;
        rep.alpha = a;
        rep.config = cfg;
        rep.result = run_ensemble(cfg, run_options(o, ckpt, resume));
        if (!rep.result.complete) {
            std::cerr << "stopped early at alpha = " << a << "; resume with --resume " << out << "\n";
            return exit_ok;
        }
        if (!rep.result.statistics) {
            std::cerr << "error: every trajectory failed at alpha = " << a << "\n";
            return exit_numerical;
        }
        if (cfg.n_ions() >= 9) {
            const auto r = inner_ions(cfg.n_ions());
            rep.trend = temperature_trend(rep.result.summaries, r.first, r.last);
        }
        auto os = open_output(alpha_file(out, "profile", a, ".csv"));
        write_profile_csv(os, rep);
        if (steady_code(rep.result) != exit_ok) code = exit_not_steady;
        reports.push_back(std::move(rep));
    }
    auto os = open_output(out / "profile_summary.csv");
    write_provenance(os, base);
    os << std::setprecision(10) << "alpha,inner_slope,inner_slope_se,inner_t,inner_spearman,spearman_critical,steady\n";
    for (const auto& r : reports) {
        os << r.alpha << ',';
        if (r.trend) {
            const auto range = inner_ions(base.n_ions());
            os << r.trend->slope.mean << ',' << r.trend->slope.std_error << ',' << r.trend->t_statistic << ','
               << r.trend->spearman << ',' << spearman_critical_value(range.last - range.first + 1) << ',';
        } else {
            os << ",,,,,";
        }
        os << (r.result.steady_state()->steady() ? 1 : 0) << '\n';
    }
    std::cout << "wrote " << reports.size() << " profiles to " << out.string() << "\n";
    return code;
}

int cmd_flux_sweep(const CommonOptions& o, double lo, double hi, double step) {
    require_resume_dir(o);
    const auto base = base_config(o);
    const auto alphas = alpha_range(lo, hi, step);
    const fs::path out(o.out);
    fs::create_directories(out);
    save_config(out, base);
    std::vector<FluxRow> rows;
    int code = exit_ok;
    for (double a : alphas) {
        const auto cfg = with_alpha(base, a);
        const fs::path ckpt = alpha_file(out, "checkpoint", a, ".json");
        const fs::path resume = o.resume.empty() ? fs::path{} : alpha_file(o.resume, "checkpoint", a, ".json");
        if (!o.quiet) std::cerr << "alpha = " << a << "\n";
        const auto r = run_ensemble(cfg, run_options(o, ckpt, resume));
        if (!r.complete) {
            std::cerr << "stopped early at alpha = " << a << "; resume with --resume " << out << "\n";
            return exit_ok;
        }
        if (!r.statistics) {
            std::cerr << "error: every trajectory failed at alpha = " << a << "\n";
            return exit_numerical;
        }
        FluxRow row;
        row.alpha = a;
        row.direct = r.statistics->flux_direct[0];
        row.novikov = r.statistics->flux_novikov[0];
        row.steady = r.steady_state()->steady();
        row.failures = r.failures.size();
        if (!row.steady) code = exit_not_steady;
        rows.push_back(row);
    }
    auto os = open_output(out / "flux_sweep.csv");
    write_flux_csv(os, base, rows);
    std::cout << "wrote " << (out / "flux_sweep.csv").string() << "\n";
    return code;
}

int cmd_spectrum(const CommonOptions& o, const std::vector<double>& alphas, double interval, bool hann) {
    const auto base = base_config(o);
    const fs::path out(o.out);
    fs::create_directories(out);
    save_config(out, base);
    const auto reports = preset_spectrum(base, alphas, interval, hann);
    auto summary = open_output(out / "spectrum_summary.csv");
    write_provenance(summary, base);
    summary << std::setprecision(10) << "alpha,ion,axis,peak_frequency,peak_power,entropy,samples\n";
    for (const auto& r : reports) {
        for (const auto* sp : {&r.axial, &r.transverse}) {
            const bool x = sp == &r.axial;
            auto os = open_output(alpha_file(out, x ? "spectrum_x" : "spectrum_y", r.alpha, ".txt"));
            write_spectrum(os, *sp);
            const auto& pk = x ? r.axial_peak : r.transverse_peak;
            summary << r.alpha << ',' << r.ion + 1 << ',' << (x ? 'x' : 'y') << ',' << pk.frequency << ','
                    << pk.power << ',' << (x ? r.axial_entropy : r.transverse_entropy) << ',' << sp->samples << '\n';
        }
    }
    std::cout << "wrote " << reports.size() << " spectrum pairs to " << out.string() << "\n";
    return exit_ok;
}

int cmd_statics(const CommonOptions& o, std::optional<std::size_t> n_override, const std::vector<double>& alphas) {
    std::size_t n = o.paper_scale ? 30 : 10;
    if (!o.config.empty()) n = load_config(o.config).n_ions();
    if (n_override) n = *n_override;
    if (n < 1) throw ConfigError("chain needs at least one ion");
    const fs::path out(o.out);
    fs::create_directories(out);
    const auto rep = preset_statics(n, alphas);
    auto os = open_output(out / "statics.csv");
    write_statics_csv(os, rep);
    std::cout << "N = " << n << ": half length " << rep.half_length << ", analytic critical ratio at the centre "
              << rep.critical_alpha_center << "\n";
    if (rep.flip_lower)
        std::cout << "linear-to-zigzag flip between alpha = " << *rep.flip_lower << " and " << *rep.flip_upper << "\n";
    std::cout << "wrote " << (out / "statics.csv").string() << "\n";
    return exit_ok;
}

int cmd_validate() {
    bool ok = true;
    for (const auto& c : run_validation_suite()) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        ok = ok && c.passed;
    }
    return ok ? exit_ok : exit_numerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heat transport in laser-cooled ion chains"};
    app.require_subcommand(1);
    CommonOptions common;

    std::optional<double> run_alpha;
    auto* run = app.add_subcommand("run", "simulate one ensemble");
    add_common(run, common);
    run->add_option("--alpha", run_alpha, "transverse-to-axial trap frequency ratio");

    std::vector<double> profile_alphas{13.0, 11.0, 9.0, 7.0};
    auto* profile = app.add_subcommand("profile", "local temperature profiles across the structural transition");
    add_common(profile, common);
    profile->add_option("--alphas", profile_alphas, "aspect ratios")->delimiter(',');

    double lo = 7.0, hi = 13.0, step = 1.0;
    auto* flux = app.add_subcommand("flux-sweep", "total axial heat flux against the aspect ratio");
    add_common(flux, common);
    flux->add_option("--alpha-min", lo);
    flux->add_option("--alpha-max", hi);
    flux->add_option("--alpha-step", step);

    std::vector<double> spectrum_alphas{13.0, 7.0};
    double interval = 0.1;
    bool hann = false;
    auto* spectrum = app.add_subcommand("spectrum", "motion spectra of the central ion");
    add_common(spectrum, common);
    spectrum->add_option("--alphas", spectrum_alphas, "aspect ratios")->delimiter(',');
    spectrum->add_option("--sample-interval", interval, "dimensionless sampling interval");
    spectrum->add_flag("--hann", hann, "apply a Hann window");

    std::optional<std::size_t> statics_n;
    std::vector<double> statics_alphas;
    auto* statics = app.add_subcommand("statics", "equilibrium configurations and critical aspect ratio");
    add_common(statics, common);
    statics->add_option("--n", statics_n, "number of ions");
    statics->add_option("--alphas", statics_alphas, "aspect ratios (default 6 to 14 in steps of 0.25)")->delimiter(',');

    auto* validate = app.add_subcommand("validate", "fast invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run) return cmd_run(common, run_alpha);
        if (*profile) return cmd_profile(common, profile_alphas);
        if (*flux) return cmd_flux_sweep(common, lo, hi, step);
        if (*spectrum) return cmd_spectrum(common, spectrum_alphas, interval, hann);
        if (*statics) {
            if (statics_alphas.empty()) statics_alphas = alpha_range(6.0, 14.0, 0.25);
            return cmd_statics(common, statics_n, statics_alphas);
        }
        if (*validate) return cmd_validate();
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const CheckpointError& e) {
        std::cerr << "checkpoint error: " << e.what() << "\n";
        return exit_config;
    } catch (const InvalidParameter& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
    return exit_ok;
}
