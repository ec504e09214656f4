#pragma once

#include "qmp/defrag.hpp"
#include "qmp/sched_core.hpp"
#include "qmp/sim.hpp"
#include "qmp/workload.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace qmp {

// Polycube <-> [[x,y,z], ...]; Cuboid <-> {w,h,l};
// PlacedCuboid <-> {id,x,y,z,w,h,l}.
void to_json(nlohmann::json& j, const Polycube& p);
void from_json(const nlohmann::json& j, Polycube& p);
void to_json(nlohmann::json& j, const Cuboid& c);
void from_json(const nlohmann::json& j, Cuboid& c);
void to_json(nlohmann::json& j, const PlacedCuboid& p);
void from_json(const nlohmann::json& j, PlacedCuboid& p);

/// A generated instance plus its provenance, as written to workload files:
/// {seed, class, requests: [{id, w, h, l, arrival}, ...]}.
struct WorkloadFile {
    std::uint64_t seed = 0;
    std::string job_class;
    std::vector<JobRequest> requests;
};

nlohmann::json workload_to_json(const WorkloadFile& w);
WorkloadFile workload_from_json(const nlohmann::json& j);

/// Ledger export: {jobs: [{id, segments: [{x,y,z,w,h,l}]}], makespan}.
nlohmann::json ledger_to_json(const ScheduleState& state);

/// One line per pass: {t, moved: [{id, from: [x,y], to: [x,y]}]}.
nlohmann::json defrag_event_to_json(const DefragEvent& event);

/// Flat run record mirroring the CSV columns.
nlohmann::json metrics_to_json(const MetricsReport& metrics, const std::string& job_class,
                               std::uint64_t seed, const std::string& scheduler,
                               bool defrag_enabled, std::size_t jobs);

std::string csv_header();
std::string csv_row(const MetricsReport& metrics, const std::string& job_class,
                    std::uint64_t seed, const std::string& scheduler,
                    bool defrag_enabled, std::size_t jobs);

} // namespace qmp
