#include "qmp/sched_core.hpp"

#include "qmp/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qmp {

Cuboid job_shape(const JobRequest& request) {
    if (const Cuboid* c = std::get_if<Cuboid>(&request.program)) return *c;
    return bounding_cuboid(std::get<Polycube>(request.program));
}

Step ReservedJob::total_length() const {
    Step total = 0;
    for (const PlacedCuboid& s : segments) total += s.l;
    return total;
}

Step ScheduleState::top_z2() const {
    Step top = 0;
    for (const ReservedJob& job : reserved) top = std::max(top, job.z2());
    return top;
}

const ReservedJob* ScheduleState::find_job(JobId id) const {
    for (const ReservedJob& job : reserved) {
        if (job.id == id) return &job;
    }
    return nullptr;
}

void LatencyModel::record_us(double us) {
    history_.push_back(us);
    while (history_.size() > kWindow) history_.pop_front();
}

double LatencyModel::mean_us() const {
    if (history_.empty()) return 0.0;
    return std::accumulate(history_.begin(), history_.end(), 0.0) /
           static_cast<double>(history_.size());
}

void LatencyModel::set_history(std::vector<double> samples_us) {
    history_.assign(samples_us.begin(), samples_us.end());
    while (history_.size() > kWindow) history_.pop_front();
}

Step estimate_schedule_point(Step now, const LatencyModel& latency,
                             const ProcessorConfig& proc) {
    static constexpr Step kDefaultOffset = 1;
    if (!latency.has_samples()) return now + kDefaultOffset;
    const double steps = latency.mean_us() / proc.step_us();
    return now + static_cast<Step>(std::ceil(steps));
}

JobQueue::JobQueue(std::vector<JobRequest> requests) {
    std::stable_sort(requests.begin(), requests.end(),
                     [](const JobRequest& a, const JobRequest& b) {
                         return a.arrival < b.arrival;
                     });
    jobs_.assign(requests.begin(), requests.end());
}

void JobQueue::push(JobRequest request) {
    auto at = std::find_if(jobs_.begin(), jobs_.end(), [&](const JobRequest& j) {
        return j.arrival > request.arrival;
    });
    jobs_.insert(at, std::move(request));
}

std::vector<JobRequest> JobQueue::take_waiting(int batch_size, Step now) {
    std::vector<JobRequest> batch;
    while (static_cast<int>(batch.size()) < batch_size && has_waiting(now)) {
        batch.push_back(std::move(jobs_.front()));
        jobs_.pop_front();
    }
    return batch;
}

std::string to_string(const Violation& v) {
    const char* kind = "?";
    switch (v.kind) {
    case ViolationKind::Overlap: kind = "overlap"; break;
    case ViolationKind::OutOfBounds: kind = "out-of-bounds"; break;
    case ViolationKind::BrokenChain: kind = "broken-chain"; break;
    case ViolationKind::BarrierViolation: kind = "barrier-violation"; break;
    case ViolationKind::BadSegment: kind = "bad-segment"; break;
    }
    std::string s = kind;
    s += " job " + std::to_string(v.a);
    if (v.b != v.a) s += " vs " + std::to_string(v.b);
    if (!v.detail.empty()) s += ": " + v.detail;
    return s;
}

std::vector<Violation> validate(const ScheduleState& state, Coord W, Coord H) {
    std::vector<Violation> out;

    for (const ReservedJob& job : state.reserved) {
        if (job.segments.empty()) {
            out.push_back({ViolationKind::BadSegment, job.id, job.id, "no segments"});
            continue;
        }
        for (std::size_t k = 0; k < job.segments.size(); ++k) {
            const PlacedCuboid& s = job.segments[k];
            if (s.w < 1 || s.h < 1 || s.l < 1 || s.x < 0 || s.y < 0 || s.z < 0) {
                out.push_back({ViolationKind::BadSegment, job.id, job.id,
                               "degenerate segment"});
            }
            if (s.x2() > W || s.y2() > H) {
                out.push_back({ViolationKind::OutOfBounds, job.id, job.id,
                               "x2=" + std::to_string(s.x2()) +
                                   " y2=" + std::to_string(s.y2())});
            }
            if (k + 1 < job.segments.size() &&
                job.segments[k + 1].z != s.z2()) {
                out.push_back({ViolationKind::BrokenChain, job.id, job.id,
                               "gap after z=" + std::to_string(s.z2())});
            }
        }
    }

    for (std::size_t i = 0; i < state.reserved.size(); ++i) {
        for (std::size_t j = i + 1; j < state.reserved.size(); ++j) {
            for (const PlacedCuboid& a : state.reserved[i].segments) {
                for (const PlacedCuboid& b : state.reserved[j].segments) {
                    if (overlaps(a, b)) {
                        out.push_back({ViolationKind::Overlap, state.reserved[i].id,
                                       state.reserved[j].id,
                                       "at z=" + std::to_string(std::max(a.z, b.z))});
                    }
                }
            }
        }
    }

    for (const DefragBarrier& barrier : state.barriers) {
        for (const ReservedJob& job : state.reserved) {
            for (const PlacedCuboid& s : job.segments) {
                if (!(s.z < barrier.t && barrier.t < s.z2())) continue;
                const RectXY foot{s.x, s.y, s.x2(), s.y2()};
                for (const RectXY& region : barrier.regions) {
                    if (foot.intersects(region)) {
                        out.push_back({ViolationKind::BarrierViolation, job.id, job.id,
                                       "spans t=" + std::to_string(barrier.t)});
                        break;
                    }
                }
            }
        }
    }

    return out;
}

void apply_placement_to_candidates(std::vector<CornerCandidate>& candidates,
                                   std::uint64_t& next_seq, const PlacedCuboid& p,
                                   Coord W, Coord H) {
    auto used = std::find_if(candidates.begin(), candidates.end(),
                             [&](const CornerCandidate& c) {
                                 return c.same_point(p.x, p.y, p.z);
                             });
    if (used != candidates.end()) candidates.erase(used);

    const CornerCandidate corners[4] = {
        {p.x, p.y, p.z2(), 0},
        {p.x, p.y2(), p.z, 0},
        {p.x2(), p.y, p.z, 0},
        {0, 0, p.z2(), 0},
    };
    for (const CornerCandidate& c : corners) {
        if (c.x >= W || c.y >= H) continue;
        const bool present = std::any_of(candidates.begin(), candidates.end(),
                                         [&](const CornerCandidate& e) {
                                             return e.same_point(c.x, c.y, c.z);
                                         });
        if (present) continue;
        candidates.push_back({c.x, c.y, c.z, next_seq++});
    }
}

void commit_placements(ScheduleState& state, std::span<const PlacedCuboid> placements,
                       Coord W, Coord H) {
    // Fresh states seed the origin candidate exactly like the scheduler's
    // working copy does, keeping the two candidate evolutions identical.
    if (state.candidates.empty() && state.reserved.empty()) {
        state.candidates.push_back({0, 0, 0, state.next_candidate_seq++});
    }
    for (const PlacedCuboid& p : placements) {
        if (state.find_job(p.id) != nullptr) {
            throw std::invalid_argument("duplicate job id " + std::to_string(p.id));
        }
        state.reserved.push_back(ReservedJob{p.id, {p}});
        apply_placement_to_candidates(state.candidates, state.next_candidate_seq, p,
                                      W, H);
    }
}

} // namespace qmp
