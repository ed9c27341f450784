#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "ionheat/harness/checkpoint.hpp"
#include "ionheat/harness/config.hpp"
#include "ionheat/integrator.hpp"
#include "ionheat/observables.hpp"
#include "ionheat/statics.hpp"

namespace ionheat {

struct RunOptions {
    unsigned workers = 1;
    std::optional<std::filesystem::path> checkpoint_path;
    std::size_t checkpoint_every = 0;           // 0: only when the run stops
    std::optional<std::size_t> stop_after;      // finish this many trajectories, then stop (resumable)
    std::optional<Checkpoint> resume;
    std::function<void(std::size_t done, std::size_t total)> progress;
};

struct EnsembleResult {
    std::vector<TrajectorySummary> summaries;  // sorted by trajectory index
    std::vector<FailedTrajectory> failures;
    BathMap baths;
    std::optional<EnsembleStatistics> statistics;  // empty when nothing survived or the run stopped early
    bool complete = false;

    std::optional<SteadyStateReport> steady_state() const {
        if (!statistics) return std::nullopt;
        return steady_state_check(*statistics);
    }
};

/// Seeds for the initial jitter and the noise stream of one trajectory.
struct TrajectorySeeds {
    std::uint64_t noise;
    std::uint64_t jitter;
};

inline TrajectorySeeds trajectory_seeds(std::uint64_t master, std::uint64_t index) {
    const std::uint64_t s = derive_seed(master, index);
    return {s, mix64(s ^ 0x6a09e667f3bcc909ULL)};
}

/// One trajectory from the relaxed linear chain through the window accumulator.
inline TrajectorySummary run_single_trajectory(const ExperimentConfig& config, const EquilibriumConfiguration& linear,
                                               const LangevinModel& model, std::uint64_t index) {
    const auto seeds = trajectory_seeds(config.master_seed(), index);
    const ChainState initial = initial_conditions(linear, config.jitter, seeds.jitter);
    SimulationSchedule schedule = config.schedule;
    schedule.seed = seeds.noise;
    WindowAccumulator acc(config.n_ions(), config.alpha(), config.window, config.batches);
    simulate_trajectory(initial, model, schedule, [&](const ChainState& s, std::size_t) { acc.observe(s); });
    return acc.finish(index, seeds.noise);
}

/// Simulates the ensemble on a bounded worker pool. Results are reduced in
/// trajectory-index order, so the statistics do not depend on the number of
/// workers or on interruptions.
inline EnsembleResult run_ensemble(const ExperimentConfig& config, const RunOptions& opt = {}) {
    config.validate();
    EnsembleResult result;
    result.baths = config.bath_map();
    const auto linear = relax_linear_chain(config.n_ions());
    const LangevinModel model(config.alpha(), result.baths);

    std::map<std::uint64_t, TrajectorySummary> done;
    std::map<std::uint64_t, FailedTrajectory> failed;
    if (opt.resume) {
        checkpoint_verify(*opt.resume, config);
        for (const auto& t : opt.resume->completed) done.emplace(t.index, t);
        for (const auto& f : opt.resume->failures) failed.emplace(f.index, f);
    }
    std::vector<std::uint64_t> pending;
    for (std::uint64_t k = 0; k < config.trajectories; ++k)
        if (!done.contains(k) && !failed.contains(k)) pending.push_back(k);

    const std::size_t budget = opt.stop_after ? std::min(*opt.stop_after, pending.size()) : pending.size();
    std::mutex mtx;
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::size_t finished_since_save = 0;

    auto snapshot = [&] {
        Checkpoint c;
        c.config_hash = config_hash(config);
        c.master_seed = config.master_seed();
        c.total = config.trajectories;
        for (const auto& [k, t] : done) c.completed.push_back(t);
        for (const auto& [k, f] : failed) c.failures.push_back(f);
        return c;
    };

    auto worker = [&] {
        for (;;) {
            const std::size_t slot = next.fetch_add(1);
            if (slot >= budget) return;
            const std::uint64_t k = pending[slot];
            std::optional<TrajectorySummary> summary;
            std::optional<FailedTrajectory> failure;
            try {
                summary = run_single_trajectory(config, linear, model, k);
            } catch (const BlowUpError& e) {
                failure = FailedTrajectory{k, e.what()};
            } catch (const SingularityError& e) {
                failure = FailedTrajectory{k, e.what()};
            } catch (...) {
                std::lock_guard lock(mtx);
                if (!fatal) fatal = std::current_exception();
                next.store(budget);
                return;
            }
            std::lock_guard lock(mtx);
            if (summary) done.emplace(k, std::move(*summary));
            else failed.emplace(k, std::move(*failure));
            if (opt.progress) opt.progress(done.size() + failed.size(), config.trajectories);
            if (opt.checkpoint_path && opt.checkpoint_every > 0 && ++finished_since_save >= opt.checkpoint_every) {
                checkpoint_save(*opt.checkpoint_path, snapshot());
                finished_since_save = 0;
            }
        }
    };

    const unsigned n_workers = std::max(1u, std::min<unsigned>(opt.workers, static_cast<unsigned>(std::max<std::size_t>(budget, 1))));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }

    if (fatal) std::rethrow_exception(fatal);
    if (opt.checkpoint_path) checkpoint_save(*opt.checkpoint_path, snapshot());

    for (auto& [k, t] : done) result.summaries.push_back(std::move(t));
    for (auto& [k, f] : failed) result.failures.push_back(std::move(f));
    result.complete = result.summaries.size() + result.failures.size() == config.trajectories;
    if (result.complete && !result.summaries.empty())
        result.statistics = compute_statistics(result.summaries, result.baths, config.window);
    return result;
}

} // namespace ionheat
