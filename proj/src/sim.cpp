#include "qmp/sim.hpp"

#include "qmp/greedy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace qmp {

std::string to_string(SchedulerKind kind) {
    return kind == SchedulerKind::CornerGreedy ? "cg" : "ilp";
}

void insert_idle_time(ScheduleState& state, Step t, Step amount) {
    if (amount <= 0) return;
    // One monotone map over every time endpoint: e < t stays, e >= t moves
    // up. Applying it to both ends of each segment keeps chains abutting
    // even when a chain boundary sits exactly on the plane (a segment
    // ending right at t holds its space through the pause).
    for (ReservedJob& job : state.reserved) {
        for (PlacedCuboid& s : job.segments) {
            if (s.z >= t) {
                s.z += amount;
            } else if (s.z2() >= t) {
                s.l += amount;
            }
        }
    }
    for (CornerCandidate& c : state.candidates) {
        if (c.z >= t) c.z += amount;
    }
    for (DefragBarrier& barrier : state.barriers) {
        if (barrier.t >= t) barrier.t += amount;
    }
    if (state.z_last >= t) state.z_last += amount;
}

namespace {

void drop_expired(ScheduleState& state) {
    std::erase_if(state.candidates,
                  [&](const CornerCandidate& c) { return c.z < state.executed; });
    std::erase_if(state.barriers,
                  [&](const DefragBarrier& b) { return b.t < state.executed; });
}

struct LatencyStats {
    std::vector<double> samples;

    void fill(MetricsReport& report) const {
        if (samples.empty()) return;
        double sum = 0.0, min = samples.front(), max = samples.front();
        for (double s : samples) {
            sum += s;
            min = std::min(min, s);
            max = std::max(max, s);
        }
        const double mean = sum / static_cast<double>(samples.size());
        double var = 0.0;
        for (double s : samples) var += (s - mean) * (s - mean);
        report.sched_mean_us = mean;
        report.sched_min_us = min;
        report.sched_max_us = max;
        report.sched_stddev_us = std::sqrt(var / static_cast<double>(samples.size()));
    }
};

} // namespace

SimResult run(const SimConfig& config, std::vector<JobRequest> requests) {
    if (config.scheduler == SchedulerKind::CornerGreedy) {
        CornerGreedyScheduler scheduler(config.processor);
        return run(config, std::move(requests), scheduler);
    }
    IlpScheduler scheduler(config.processor, config.ilp);
    return run(config, std::move(requests), scheduler);
}

SimResult run(const SimConfig& config, std::vector<JobRequest> requests,
              Scheduler& scheduler) {
    if (config.batch_size < 1) throw SimulationError("batch size must be positive");
    if (config.defrag_interval < 1) {
        throw SimulationError("defrag interval must be positive");
    }
    const ProcessorConfig& proc = config.processor;
    for (const JobRequest& request : requests) {
        const Cuboid shape = job_shape(request);
        if (!((shape.w <= proc.width && shape.h <= proc.height) ||
              (shape.h <= proc.width && shape.w <= proc.height))) {
            throw SimulationError("job " + std::to_string(request.id) +
                                  " is wider than the chip");
        }
    }

    SimResult result;
    ScheduleState& state = result.state;
    seed_candidates(state);

    LatencyModel latency = config.latency;
    if (!latency.is_measured() && !latency.has_samples()) {
        // The synthetic cost is known up front; start the estimator on it
        // instead of the cold-start offset so runs are exactly the model.
        latency.record_us(latency.cost_us(config.batch_size, 0));
    }

    MetricsReport& metrics = result.metrics;
    for (const JobRequest& request : requests) metrics.sum_l += job_shape(request).l;

    JobQueue queue(std::move(requests));
    LatencyStats stats;
    Step now = 0;

    while (!queue.empty()) {
        if (!queue.has_waiting(now)) {
            now = queue.next_arrival();
            continue;
        }
        const Step cycle_start = now;
        state.executed = now;
        drop_expired(state);

        if (config.defrag_enabled) {
            std::vector<DefragEvent> events =
                defrag(state, config.defrag_interval, proc.width, proc.height);
            // Relocation cost is charged after the passes ran; each earlier
            // insertion has already shifted the later planes upward.
            Step inserted = 0;
            for (DefragEvent& event : events) {
                metrics.defrag_count += 1;
                if (config.relocation_cost_steps > 0) {
                    insert_idle_time(state, event.t + inserted,
                                     config.relocation_cost_steps);
                    inserted += config.relocation_cost_steps;
                }
                result.defrag_events.push_back(std::move(event));
            }
        }

        // A shrinking latency window may estimate below the previous
        // schedule point; announced points never move backwards.
        const Step sp =
            std::max(estimate_schedule_point(now, latency, proc), state.schedule_point);
        state.schedule_point = sp;

        const std::vector<JobRequest> batch =
            queue.take_waiting(config.batch_size, now);

        double duration_us = 0.0;
        std::vector<PlacedCuboid> placements;
        if (latency.is_measured()) {
            const auto t0 = std::chrono::steady_clock::now();
            placements = scheduler.schedule_batch(state, batch, sp);
            const auto t1 = std::chrono::steady_clock::now();
            duration_us = std::chrono::duration<double, std::micro>(t1 - t0).count();
        } else {
            placements = scheduler.schedule_batch(state, batch, sp);
            duration_us = latency.cost_us(static_cast<int>(batch.size()),
                                          static_cast<int>(state.reserved.size()));
        }
        latency.record_us(duration_us);
        stats.samples.push_back(duration_us);

        const Step latency_steps =
            static_cast<Step>(std::ceil(duration_us / proc.step_us()));
        const Step stall = std::max<Step>(0, latency_steps - (sp - cycle_start));
        if (stall > 0) {
            // The whole execution pauses at the schedule point until the
            // scheduler answers; everything not yet started moves with it.
            insert_idle_time(state, sp, stall);
            for (PlacedCuboid& p : placements) p.z += stall;
            metrics.stall_steps += stall;
        }

        commit_placements(state, placements, proc.width, proc.height);
        const std::vector<Violation> violations =
            validate(state, proc.width, proc.height);
        if (!violations.empty()) {
            std::string report = "scheduler produced an inconsistent ledger:";
            for (const Violation& v : violations) report += "\n  " + to_string(v);
            throw SimulationError(report);
        }

        metrics.cycles += 1;
        now = cycle_start + latency_steps;
    }

    metrics.makespan = state.top_z2();
    stats.fill(metrics);
    return result;
}

} // namespace qmp
