#pragma once

// Checkpoints of a partially completed ensemble.
//
// A checkpoint holds the per-trajectory summaries finished so far. Doubles
// are written with round-trip precision, so a resumed run reduces exactly
// the same numbers as an uninterrupted one.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "ionheat/errors.hpp"
#include "ionheat/harness/config.hpp"
#include "ionheat/observables.hpp"

namespace ionheat {

inline constexpr const char* checkpoint_version = "ionheat-checkpoint-1";

struct FailedTrajectory {
    std::uint64_t index = 0;
    std::string reason;
    friend bool operator==(const FailedTrajectory&, const FailedTrajectory&) = default;
};

struct Checkpoint {
    std::string version = checkpoint_version;
    std::uint64_t config_hash = 0;
    std::uint64_t master_seed = 0;
    std::size_t total = 0;
    std::vector<TrajectorySummary> completed;  // sorted by index
    std::vector<FailedTrajectory> failures;

    std::size_t completed_count() const { return completed.size() + failures.size(); }
    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

inline nlohmann::json to_json(const ObservableMeans& m) {
    return {{"count", m.count}, {"p2", m.p2}, {"q", m.q}, {"p2q", m.p2q},
            {"pair_inflow", m.pair_inflow}, {"flux", {m.flux[0], m.flux[1]}}};
}

inline ObservableMeans observable_means_from_json(const nlohmann::json& j) {
    ObservableMeans m;
    m.count = j.at("count").get<std::size_t>();
    m.p2 = j.at("p2").get<std::vector<double>>();
    m.q = j.at("q").get<std::vector<double>>();
    m.p2q = j.at("p2q").get<std::vector<double>>();
    m.pair_inflow = j.at("pair_inflow").get<std::vector<double>>();
    const auto f = j.at("flux").get<std::vector<double>>();
    if (f.size() != 2) throw CheckpointError("flux must have two components");
    m.flux = {f[0], f[1]};
    const std::size_t n = m.pair_inflow.size();
    if (m.p2.size() != 2 * n || m.q.size() != 2 * n || m.p2q.size() != 4 * n)
        throw CheckpointError("inconsistent moment array lengths");
    return m;
}

inline nlohmann::json to_json(const Checkpoint& c) {
    nlohmann::json done = nlohmann::json::array();
    for (const auto& t : c.completed) {
        nlohmann::json batches = nlohmann::json::array();
        for (const auto& b : t.batches) batches.push_back(to_json(b));
        done.push_back({{"index", t.index}, {"seed", t.seed}, {"batches", batches}});
    }
    nlohmann::json failed = nlohmann::json::array();
    for (const auto& f : c.failures) failed.push_back({{"index", f.index}, {"reason", f.reason}});
    return {{"version", c.version}, {"config_hash", hex64(c.config_hash)}, {"master_seed", c.master_seed},
            {"total", c.total}, {"completed", done}, {"failures", failed}};
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
    Checkpoint c;
    try {
        c.version = j.at("version").get<std::string>();
        c.config_hash = std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
        c.master_seed = j.at("master_seed").get<std::uint64_t>();
        c.total = j.at("total").get<std::size_t>();
        for (const auto& t : j.at("completed")) {
            TrajectorySummary s;
            s.index = t.at("index").get<std::uint64_t>();
            s.seed = t.at("seed").get<std::uint64_t>();
            for (const auto& b : t.at("batches")) s.batches.push_back(observable_means_from_json(b));
            c.completed.push_back(std::move(s));
        }
        for (const auto& f : j.at("failures"))
            c.failures.push_back({f.at("index").get<std::uint64_t>(), f.at("reason").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
    } catch (const std::logic_error& e) {  // stoull
        throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
    }
    return c;
}

/// Writes next to the target and renames, so readers never see a partial file.
inline void checkpoint_save(const std::filesystem::path& path, const Checkpoint& c) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw CheckpointError("cannot write " + tmp.string());
        out << to_json(c).dump();
        if (!out.flush()) throw CheckpointError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw CheckpointError("cannot move checkpoint into place: " + ec.message());
}

inline Checkpoint checkpoint_load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError("cannot parse checkpoint " + path.string() + ": " + e.what());
    }
    return checkpoint_from_json(j);
}

/// Refuses checkpoints written by another format version or another configuration.
inline void checkpoint_verify(const Checkpoint& c, const ExperimentConfig& config) {
    if (c.version != checkpoint_version) throw CheckpointError("checkpoint version mismatch: " + c.version);
    if (c.config_hash != config_hash(config))
        throw CheckpointError("checkpoint was written for a different configuration (hash " + hex64(c.config_hash)
                              + ", expected " + hex64(config_hash(config)) + ")");
    if (c.master_seed != config.master_seed()) throw CheckpointError("checkpoint master seed mismatch");
    if (c.total != config.trajectories) throw CheckpointError("checkpoint ensemble size mismatch");
    for (const auto& t : c.completed)
        if (t.index >= c.total) throw CheckpointError("checkpoint holds an out-of-range trajectory index");
}

} // namespace ionheat
