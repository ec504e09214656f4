#include "qmp/greedy.hpp"

#include "qmp/defrag.hpp"

#include <algorithm>
#include <stdexcept>

namespace qmp {

const std::vector<CornerCandidate>& seed_candidates(ScheduleState& state) {
    if (state.candidates.empty() && state.reserved.empty()) {
        state.candidates.push_back({0, 0, 0, state.next_candidate_seq++});
    }
    return state.candidates;
}

namespace {

// Reserved segments sorted by descending finish, so conflict checks can
// stop as soon as segments end at or below the candidate start.
struct OccupancyIndex {
    std::vector<PlacedCuboid> by_finish;

    explicit OccupancyIndex(const ScheduleState& state) {
        for (const ReservedJob& job : state.reserved) {
            by_finish.insert(by_finish.end(), job.segments.begin(), job.segments.end());
        }
        std::sort(by_finish.begin(), by_finish.end(),
                  [](const PlacedCuboid& a, const PlacedCuboid& b) {
                      return a.z2() > b.z2();
                  });
    }

    bool conflicts(const PlacedCuboid& box) const {
        for (const PlacedCuboid& s : by_finish) {
            if (s.z2() <= box.z) break;
            if (overlaps(box, s)) return true;
        }
        return false;
    }
};

bool preferred(const CornerCandidate& a, const CornerCandidate& b) {
    if (a.z != b.z) return a.z < b.z;
    if (a.x + a.y != b.x + b.y) return a.x + a.y < b.x + b.y;
    if (a.x != b.x) return a.x < b.x;
    return a.seq < b.seq;
}

} // namespace

std::vector<PlacedCuboid> corner_greedy_schedule(const ScheduleState& state,
                                                 std::span<const JobRequest> batch,
                                                 Step sp, const ProcessorConfig& proc) {
    const Coord W = proc.width;
    const Coord H = proc.height;

    std::vector<CornerCandidate> candidates = state.candidates;
    std::uint64_t next_seq = state.next_candidate_seq;
    if (candidates.empty() && state.reserved.empty()) {
        candidates.push_back({0, 0, 0, next_seq++});
    }

    const OccupancyIndex reserved(state);
    std::vector<PlacedCuboid> placed; // this batch, in placement order
    Step top = state.top_z2();

    auto feasible = [&](const PlacedCuboid& box) {
        if (box.x2() > W || box.y2() > H) return false;
        if (reserved.conflicts(box)) return false;
        for (const PlacedCuboid& p : placed) {
            if (overlaps(box, p)) return false;
        }
        return !barrier_blocks(state.barriers, box);
    };

    std::vector<PlacedCuboid> result;
    result.reserve(batch.size());
    for (const JobRequest& request : batch) {
        const Cuboid shape = job_shape(request);
        const Cuboid orientations[2] = {shape, oriented(shape, Rotation::R90)};
        const int orientation_count = shape.w == shape.h ? 1 : 2;

        std::vector<std::size_t> order(candidates.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return preferred(candidates[a], candidates[b]);
        });

        PlacedCuboid chosen;
        bool found = false;
        for (std::size_t idx : order) {
            const CornerCandidate& c = candidates[idx];
            if (c.z < sp) continue;
            for (int o = 0; o < orientation_count && !found; ++o) {
                const PlacedCuboid box{request.id, c.x,  c.y,  c.z,
                                       orientations[o].w, orientations[o].h,
                                       orientations[o].l};
                if (feasible(box)) {
                    chosen = box;
                    found = true;
                }
            }
            if (found) break;
        }

        if (!found) {
            // Top-of-stack fallback; feasible for any job that fits the chip.
            // The candidate is consumed immediately, so it does not take a
            // sequence number: the commit path never sees it and the counter
            // must stay aligned with the committed candidate set.
            const Step z = std::max(sp, top);
            candidates.push_back({0, 0, z, next_seq});
            for (int o = 0; o < 2 && !found; ++o) {
                const PlacedCuboid box{request.id, 0,    0,    z,
                                       orientations[o].w, orientations[o].h,
                                       orientations[o].l};
                if (box.x2() <= W && box.y2() <= H) {
                    chosen = box;
                    found = true;
                }
            }
            if (!found) {
                throw std::invalid_argument("job " + std::to_string(request.id) +
                                            " does not fit the chip");
            }
        }

        placed.push_back(chosen);
        result.push_back(chosen);
        top = std::max(top, chosen.z2());
        apply_placement_to_candidates(candidates, next_seq, chosen, W, H);
    }
    return result;
}

} // namespace qmp
