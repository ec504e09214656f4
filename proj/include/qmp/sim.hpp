#pragma once

#include "qmp/defrag.hpp"
#include "qmp/ilp.hpp"
#include "qmp/sched_core.hpp"

#include <stdexcept>
#include <vector>

namespace qmp {

enum class SchedulerKind { CornerGreedy, Ilp };

std::string to_string(SchedulerKind kind);

struct SimConfig {
    ProcessorConfig processor;
    int batch_size = 5;
    bool defrag_enabled = true;
    Step defrag_interval = 20000; // logical steps
    SchedulerKind scheduler = SchedulerKind::CornerGreedy;
    LatencyModel latency = LatencyModel::measured();
    IlpOptions ilp;
    /// Idle steps charged at each defragmentation plane. Relocation is
    /// modelled as free by default; raise for sensitivity studies.
    Step relocation_cost_steps = 0;
    std::uint64_t seed = 0; // recorded in reports; the loop itself is seedless
};

struct MetricsReport {
    Step makespan = 0;
    Step sum_l = 0; // total requested execution steps
    int cycles = 0;
    double sched_mean_us = 0.0;
    double sched_min_us = 0.0;
    double sched_max_us = 0.0;
    double sched_stddev_us = 0.0;
    Step stall_steps = 0;
    int defrag_count = 0;

    double speedup() const {
        if (makespan <= 0) return 1.0;
        return static_cast<double>(sum_l) / static_cast<double>(makespan);
    }
};

struct SimResult {
    ScheduleState state;
    MetricsReport metrics;
    std::vector<DefragEvent> defrag_events;
};

/// Raised when a scheduler hands back placements the ledger audit rejects.
class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

/// Inserts `amount` idle steps at plane t: segments starting at or above t
/// shift up, segments reaching t stretch across the pause, and candidates
/// and barrier planes at or above t move with them. One monotone endpoint
/// map keeps every non-overlap and chain-contiguity relation intact.
void insert_idle_time(ScheduleState& state, Step t, Step amount);

/// Runs the full scheduling workflow: per cycle, defragment, estimate the
/// schedule point, pull a FIFO batch, schedule it, charge the scheduling
/// latency (pausing execution when it overruns the schedule point), commit
/// and audit. In measured mode the latency is the wall clock of the
/// scheduler call; in synthetic mode it is the model's cost function, and
/// the estimator history is pre-seeded with that cost so runs are exactly
/// reproducible.
SimResult run(const SimConfig& config, std::vector<JobRequest> requests);

/// Same loop with a caller-supplied scheduler (config.scheduler ignored).
SimResult run(const SimConfig& config, std::vector<JobRequest> requests,
              Scheduler& scheduler);

} // namespace qmp
