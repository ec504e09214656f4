#pragma once

#include "qmp/sched_core.hpp"

#include <span>

namespace qmp {

/// Seeds a fresh ledger with the origin candidate. Existing candidate
/// sets are kept as-is; stale candidates are filtered at use, not here.
const std::vector<CornerCandidate>& seed_candidates(ScheduleState& state);

/// Corner-greedy placement for one batch. Jobs are handled in batch order;
/// each is tried at every candidate with z >= sp, in both orientations,
/// and takes the conflict-free position with the smallest z, ties broken
/// by smallest x+y, then smallest x, then candidate insertion order, then
/// the unrotated orientation. Placing a job consumes its candidate and
/// deposits the far-face corners plus the top-of-stack fallback, so later
/// batch members see the updated set. Never fails: when every candidate is
/// blocked the job goes to (0, 0, top of stack).
std::vector<PlacedCuboid> corner_greedy_schedule(const ScheduleState& state,
                                                 std::span<const JobRequest> batch,
                                                 Step sp, const ProcessorConfig& proc);

class CornerGreedyScheduler final : public Scheduler {
public:
    explicit CornerGreedyScheduler(ProcessorConfig proc) : proc_(proc) {}

    std::vector<PlacedCuboid> schedule_batch(const ScheduleState& state,
                                             std::span<const JobRequest> batch,
                                             Step sp) override {
        return corner_greedy_schedule(state, batch, sp, proc_);
    }
    std::string name() const override { return "cg"; }

private:
    ProcessorConfig proc_;
};

} // namespace qmp
