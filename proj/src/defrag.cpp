#include "qmp/defrag.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace qmp {

bool barrier_blocks(std::span<const DefragBarrier> barriers, const PlacedCuboid& box) {
    const RectXY foot{box.x, box.y, box.x2(), box.y2()};
    for (const DefragBarrier& barrier : barriers) {
        if (!(box.z < barrier.t && barrier.t < box.z2())) continue;
        for (const RectXY& region : barrier.regions) {
            if (foot.intersects(region)) return true;
        }
    }
    return false;
}

namespace {

struct Part {
    JobId id = 0;
    PlacedCuboid box;
    Coord orig_x = 0, orig_y = 0;
    std::size_t order = 0; // original (job, segment) discovery order
};

bool spans_overlap(Coord a1, Coord a2, Coord b1, Coord b2) {
    return a1 < b2 && b1 < a2;
}

// One compaction sweep along y (or x when `along_x`). Parts are visited in
// ascending position on the swept axis and each lands on top of the
// furthest already-swept part it overlaps on the two other axes.
void sweep(std::vector<Part>& parts, bool along_x) {
    std::stable_sort(parts.begin(), parts.end(), [&](const Part& a, const Part& b) {
        const Coord pa = along_x ? a.box.x : a.box.y;
        const Coord pb = along_x ? b.box.x : b.box.y;
        if (pa != pb) return pa < pb;
        const Coord sa = along_x ? a.box.y : a.box.x;
        const Coord sb = along_x ? b.box.y : b.box.x;
        if (sa != sb) return sa < sb;
        if (a.box.z != b.box.z) return a.box.z < b.box.z;
        return a.order < b.order;
    });
    for (std::size_t i = 0; i < parts.size(); ++i) {
        Coord floor = 0;
        for (std::size_t j = 0; j < i; ++j) {
            const PlacedCuboid& p = parts[i].box;
            const PlacedCuboid& q = parts[j].box;
            const bool other_axis = along_x ? spans_overlap(p.y, p.y2(), q.y, q.y2())
                                            : spans_overlap(p.x, p.x2(), q.x, q.x2());
            const bool z_axis = p.z < q.z2() && q.z < p.z2();
            if (other_axis && z_axis) {
                floor = std::max(floor, along_x ? q.x2() : q.y2());
            }
        }
        if (along_x) {
            parts[i].box.x = floor;
        } else {
            parts[i].box.y = floor;
        }
    }
}

} // namespace

std::optional<DefragEvent> defrag_at(ScheduleState& state, Step t, Coord W, Coord H) {
    if (t <= state.executed) {
        throw std::invalid_argument("defrag plane not in the future");
    }
    if (t < state.schedule_point) {
        throw std::invalid_argument("defrag plane below the schedule point");
    }
    if (t < state.z_last) {
        throw std::invalid_argument("defrag plane below the previous one");
    }
    state.z_last = t;

    std::map<JobId, std::vector<PlacedCuboid>> below;
    std::vector<Part> above;
    std::size_t order = 0;
    for (const ReservedJob& job : state.reserved) {
        for (const PlacedCuboid& s : job.segments) {
            if (s.z2() <= t) {
                below[job.id].push_back(s);
            } else if (s.z >= t) {
                above.push_back({job.id, s, s.x, s.y, order++});
            } else {
                PlacedCuboid lower = s, upper = s;
                lower.l = t - s.z;
                upper.z = t;
                upper.l = s.z2() - t;
                below[job.id].push_back(lower);
                above.push_back({job.id, upper, s.x, s.y, order++});
            }
        }
    }
    if (above.empty()) return std::nullopt;

    // Volume per job, to re-check conservation after the rebuild.
    std::map<JobId, Step> length_before;
    for (const ReservedJob& job : state.reserved) {
        length_before[job.id] = job.total_length();
    }

    sweep(above, /*along_x=*/false);
    sweep(above, /*along_x=*/true);

    DefragEvent event{t, {}};
    for (const Part& part : above) {
        if (part.box.x == part.orig_x && part.box.y == part.orig_y) continue;
        if (part.box.x > part.orig_x || part.box.y > part.orig_y) {
            throw std::logic_error("defrag moved a part away from the origin");
        }
        event.moved.push_back({part.id, part.orig_x, part.orig_y, part.box.x, part.box.y});
    }

    // Rebuild each job's chain: below parts, then the swept parts, merging
    // neighbours that ended up at the same footprint.
    std::map<JobId, std::vector<PlacedCuboid>> rebuilt = std::move(below);
    for (const Part& part : above) rebuilt[part.id].push_back(part.box);
    for (ReservedJob& job : state.reserved) {
        auto& segs = rebuilt[job.id];
        std::sort(segs.begin(), segs.end(),
                  [](const PlacedCuboid& a, const PlacedCuboid& b) { return a.z < b.z; });
        std::vector<PlacedCuboid> merged;
        for (const PlacedCuboid& s : segs) {
            if (!merged.empty() && merged.back().x == s.x && merged.back().y == s.y &&
                merged.back().w == s.w && merged.back().h == s.h &&
                merged.back().z2() == s.z) {
                merged.back().l += s.l;
            } else {
                merged.push_back(s);
            }
        }
        job.segments = std::move(merged);
        if (job.total_length() != length_before[job.id]) {
            throw std::logic_error("defrag changed the volume of job " +
                                   std::to_string(job.id));
        }
    }

    // A relocation corridor exists exactly where live state crosses from
    // one footprint to another: at every surviving chain seam. A part that
    // merely changed its assigned position before ever starting transports
    // nothing and blocks nothing. Rebuilding the barrier set from the
    // final chains also refreshes corridors whose endpoints this pass
    // moved again.
    std::map<Step, std::vector<RectXY>> corridors;
    for (const ReservedJob& job : state.reserved) {
        for (std::size_t k = 0; k + 1 < job.segments.size(); ++k) {
            const PlacedCuboid& from = job.segments[k];
            const PlacedCuboid& to = job.segments[k + 1];
            auto& regions = corridors[to.z];
            regions.push_back({from.x, from.y, from.x2(), from.y2()});
            regions.push_back({to.x, to.y, to.x2(), to.y2()});
        }
    }
    state.barriers.clear();
    for (auto& [plane, regions] : corridors) {
        if (plane <= state.executed) continue;
        state.barriers.push_back({plane, std::move(regions)});
    }

    // Refresh the candidate frontier around the compacted layout: each
    // relocated part deposits corners like a fresh placement, and the
    // bottom corner of the space it vacated becomes usable again.
    for (const Part& part : above) {
        if (part.box.x == part.orig_x && part.box.y == part.orig_y) continue;
        apply_placement_to_candidates(state.candidates, state.next_candidate_seq,
                                      part.box, W, H);
        const bool vacated_present = std::any_of(
            state.candidates.begin(), state.candidates.end(),
            [&](const CornerCandidate& c) {
                return c.same_point(part.orig_x, part.orig_y, part.box.z);
            });
        if (!vacated_present) {
            state.candidates.push_back(
                {part.orig_x, part.orig_y, part.box.z, state.next_candidate_seq++});
        }
    }

    if (event.moved.empty()) return std::nullopt;
    return event;
}

std::vector<Step> defrag_points(const ScheduleState& state, Step interval) {
    std::vector<Step> finishes;
    for (const ReservedJob& job : state.reserved) {
        const Step z2 = job.z2();
        if (z2 > state.z_last && z2 > state.executed && z2 >= state.schedule_point) {
            finishes.push_back(z2);
        }
    }
    std::sort(finishes.begin(), finishes.end());
    finishes.erase(std::unique(finishes.begin(), finishes.end()), finishes.end());

    std::vector<Step> points;
    for (std::size_t i = 0; i + 1 < finishes.size(); ++i) {
        if (finishes[i + 1] - finishes[i] >= interval) points.push_back(finishes[i]);
    }
    return points;
}

std::vector<DefragEvent> defrag(ScheduleState& state, Step interval, Coord W, Coord H) {
    std::vector<DefragEvent> events;
    for (const Step t : defrag_points(state, interval)) {
        if (auto event = defrag_at(state, t, W, H)) {
            events.push_back(std::move(*event));
        }
    }
    return events;
}

} // namespace qmp
