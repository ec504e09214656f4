#pragma once

// Exhaustive minimum-makespan oracle for desk-scale instances: iterative
// deepening on the makespan with a depth-first placement enumeration over
// every integer position. Independent of the production search.

#include "qmp/geometry.hpp"
#include "qmp/sched_core.hpp"

#include <algorithm>
#include <vector>

namespace brute {

struct Instance {
    std::vector<qmp::Cuboid> jobs;
    std::vector<qmp::PlacedCuboid> fixed;
    std::vector<qmp::DefragBarrier> barriers;
    qmp::Coord W = 4, H = 4;
    qmp::Step sp = 0;
    bool rotation = true;
};

namespace detail {

inline bool clash(const qmp::PlacedCuboid& a, const qmp::PlacedCuboid& b) {
    return a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h &&
           b.y < a.y + a.h && a.z < b.z + b.l && b.z < a.z + a.l;
}

inline bool spans_barrier(const Instance& inst, const qmp::PlacedCuboid& box) {
    for (const qmp::DefragBarrier& barrier : inst.barriers) {
        if (!(box.z < barrier.t && barrier.t < box.z + box.l)) continue;
        for (const qmp::RectXY& region : barrier.regions) {
            if (box.x < region.x2 && region.x1 < box.x + box.w &&
                box.y < region.y2 && region.y1 < box.y + box.h) {
                return true;
            }
        }
    }
    return false;
}

inline bool place_rest(const Instance& inst, std::vector<qmp::PlacedCuboid>& placed,
                       std::size_t k, qmp::Step v) {
    if (k == inst.jobs.size()) return true;
    const qmp::Cuboid& job = inst.jobs[k];
    const int orientations = inst.rotation && job.w != job.h ? 2 : 1;
    for (int o = 0; o < orientations; ++o) {
        const qmp::Coord w = o == 0 ? job.w : job.h;
        const qmp::Coord h = o == 0 ? job.h : job.w;
        if (w > inst.W || h > inst.H) continue;
        for (qmp::Step z = inst.sp; z + job.l <= v; ++z) {
            for (qmp::Coord y = 0; y + h <= inst.H; ++y) {
                for (qmp::Coord x = 0; x + w <= inst.W; ++x) {
                    // Identical jobs are interchangeable; keep them ordered.
                    if (k > 0 && inst.jobs[k - 1] == job) {
                        const qmp::PlacedCuboid& prev = placed[inst.fixed.size() + k - 1];
                        if (std::tuple(z, y, x) < std::tuple(prev.z, prev.y, prev.x)) {
                            continue;
                        }
                    }
                    const qmp::PlacedCuboid box{static_cast<qmp::JobId>(k),
                                                x, y, z, w, h, job.l};
                    bool free = !spans_barrier(inst, box);
                    for (const qmp::PlacedCuboid& other : placed) {
                        if (!free || clash(box, other)) {
                            free = false;
                            break;
                        }
                    }
                    if (!free) continue;
                    placed.push_back(box);
                    if (place_rest(inst, placed, k + 1, v)) return true;
                    placed.pop_back();
                }
            }
        }
    }
    return false;
}

} // namespace detail

/// Smallest v such that all jobs fit into [0,W)x[0,H)x[sp,v] around the
/// fixed boxes, with every job finishing by v.
inline qmp::Step min_makespan(const Instance& inst) {
    qmp::Step volume = 0, longest = 0, total = 0;
    for (const qmp::Cuboid& job : inst.jobs) {
        volume += job.volume();
        longest = std::max(longest, job.l);
        total += job.l;
    }
    const qmp::Step area = inst.W * inst.H;
    qmp::Step lb = inst.sp + std::max(longest, (volume + area - 1) / area);
    qmp::Step fixed_top = inst.sp;
    for (const qmp::PlacedCuboid& f : inst.fixed) {
        fixed_top = std::max(fixed_top, f.z + f.l);
    }
    for (const qmp::DefragBarrier& b : inst.barriers) {
        fixed_top = std::max(fixed_top, b.t); // stacking above spans nothing
    }
    const qmp::Step ub = fixed_top + total;

    for (qmp::Step v = lb; v <= ub; ++v) {
        std::vector<qmp::PlacedCuboid> placed(inst.fixed.begin(), inst.fixed.end());
        if (detail::place_rest(inst, placed, 0, v)) return v;
    }
    return ub;
}

} // namespace brute
