#pragma once

#include "qmp/sched_core.hpp"

#include <optional>
#include <span>

namespace qmp {

/// One relocated part: the xy move applied to a job segment at the plane.
struct DefragMove {
    JobId id = 0;
    Coord from_x = 0, from_y = 0;
    Coord to_x = 0, to_y = 0;
};

/// Record of a single defragmentation pass at plane t.
struct DefragEvent {
    Step t = 0;
    std::vector<DefragMove> moved;
};

/// True iff the box spans strictly across a barrier plane (z < t < z+l)
/// while its footprint touches one of that barrier's relocation regions.
/// Both schedulers must consult this before accepting a placement.
bool barrier_blocks(std::span<const DefragBarrier> barriers, const PlacedCuboid& box);

/// Compacts everything scheduled at or above plane t: segments crossing t
/// are cut, the parts above are swept toward y=0 and then x=0 (each part
/// stops against the nearest already-swept part it meets in x/z extent),
/// and the barrier set is rebuilt from the surviving chain seams, where
/// live state will actually cross between footprints. Parts that had not
/// started yet are reassigned without leaving a corridor. Every relocated
/// part counts as a fresh placement for the candidate set: its corners at
/// the new position and the corner of the space it vacated are deposited,
/// so the scheduler can pack against the compacted layout. Requires
/// t > executed time, t >= the schedule point in force, and t >= z_last.
/// Returns nothing when no part moved.
std::optional<DefragEvent> defrag_at(ScheduleState& state, Step t, Coord W, Coord H);

/// The planes an interval-triggered pass would compact at: job finish
/// times above z_last (and ahead of execution and the schedule point), in
/// chronological order, keeping only those whose gap to the next finish
/// is at least `interval`.
std::vector<Step> defrag_points(const ScheduleState& state, Step interval);

/// Interval-triggered defragmentation: runs defrag_at at each chosen
/// plane in chronological order. Called at the start of each scheduling
/// cycle; returns the passes that actually moved something.
std::vector<DefragEvent> defrag(ScheduleState& state, Step interval, Coord W, Coord H);

} // namespace qmp
