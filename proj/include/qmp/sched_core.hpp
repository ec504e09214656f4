#pragma once

#include "qmp/geometry.hpp"

#include <deque>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qmp {

/// Chip dimensions and the time unit conversion. One logical step equals
/// code_distance code cycles of code_cycle_us microseconds each.
struct ProcessorConfig {
    Coord width = 20;
    Coord height = 20;
    double code_cycle_us = 1.0;
    int code_distance = 31;

    double step_us() const { return code_cycle_us * code_distance; }
};

/// A submitted program. Programs arrive either as raw polycubes (boxed by
/// the preprocessor) or directly as cuboids.
struct JobRequest {
    JobId id = 0;
    std::variant<Cuboid, Polycube> program;
    Step arrival = 0;
};

/// The cuboid a scheduler actually packs: the program itself, or its
/// bounding box when the program is a polycube.
Cuboid job_shape(const JobRequest& request);

/// A job admitted to the processor. Starts as a single segment; a
/// defragmentation pass may split it into several z-contiguous parts.
struct ReservedJob {
    JobId id = 0;
    std::vector<PlacedCuboid> segments; // ascending z, chained end to start

    Step z1() const { return segments.front().z; }
    Step z2() const { return segments.back().z2(); }
    Step total_length() const;
};

/// A candidate origin for the corner-greedy scheduler. seq records
/// insertion order and is the final placement tie-breaker.
struct CornerCandidate {
    Coord x = 0, y = 0;
    Step z = 0;
    std::uint64_t seq = 0;

    bool same_point(Coord px, Coord py, Step pz) const {
        return x == px && y == py && z == pz;
    }
};

/// Half-open chip-plane rectangle [x1,x2) x [y1,y2).
struct RectXY {
    Coord x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    bool intersects(const RectXY& o) const {
        return x1 < o.x2 && o.x1 < x2 && y1 < o.y2 && o.y1 < y2;
    }
    friend bool operator==(const RectXY&, const RectXY&) = default;
};

/// A relocation corridor left behind by defragmentation: at plane t, live
/// state crosses between the recorded footprints (the two sides of every
/// split-job seam at t). New jobs may not span across t over any region.
struct DefragBarrier {
    Step t = 0;
    std::vector<RectXY> regions;
};

/// The processor ledger: everything the coordinator knows about admitted
/// work. Owned by a single coordinator; schedulers get read snapshots.
struct ScheduleState {
    std::vector<ReservedJob> reserved;
    std::vector<CornerCandidate> candidates;
    std::uint64_t next_candidate_seq = 0;
    std::vector<DefragBarrier> barriers;
    Step schedule_point = 0; // earliest start for the next placements
    Step z_last = 0;         // most recent defragmentation plane
    Step executed = 0;       // execution front in logical steps

    Step top_z2() const; // max finish over all segments, 0 when empty
    const ReservedJob* find_job(JobId id) const;
};

/// Scheduling-latency tracker. Measured mode records wall-clock durations;
/// synthetic mode prices a cycle as base + per_job*batch + per_reserved*r
/// microseconds, which keeps simulations reproducible.
class LatencyModel {
public:
    static LatencyModel measured() { return LatencyModel(true, 0, 0, 0); }
    static LatencyModel synthetic(double base_us, double per_job_us = 0.0,
                                  double per_reserved_us = 0.0) {
        return LatencyModel(false, base_us, per_job_us, per_reserved_us);
    }

    bool is_measured() const { return measured_; }
    double cost_us(int batch_jobs, int reserved_jobs) const {
        return base_us_ + per_job_us_ * batch_jobs + per_reserved_us_ * reserved_jobs;
    }

    void record_us(double us);
    bool has_samples() const { return !history_.empty(); }
    double mean_us() const;
    void set_history(std::vector<double> samples_us);

    static constexpr std::size_t kWindow = 16;

private:
    LatencyModel(bool measured, double base, double per_job, double per_reserved)
        : measured_(measured), base_us_(base), per_job_us_(per_job),
          per_reserved_us_(per_reserved) {}

    bool measured_;
    double base_us_, per_job_us_, per_reserved_us_;
    std::deque<double> history_;
};

/// Next schedule point: now plus the mean of past scheduling durations,
/// rounded up to whole logical steps. Falls back to a one-step offset
/// before any sample exists.
Step estimate_schedule_point(Step now, const LatencyModel& latency,
                             const ProcessorConfig& proc);

/// FIFO arrival queue. Jobs become visible once their arrival time passes.
class JobQueue {
public:
    JobQueue() = default;
    explicit JobQueue(std::vector<JobRequest> requests);

    void push(JobRequest request);
    /// Removes and returns up to `batch_size` arrived jobs in FIFO order.
    std::vector<JobRequest> take_waiting(int batch_size, Step now);

    bool empty() const { return jobs_.empty(); }
    std::size_t size() const { return jobs_.size(); }
    bool has_waiting(Step now) const { return !jobs_.empty() && jobs_.front().arrival <= now; }
    /// Earliest arrival among queued jobs; only meaningful when non-empty.
    Step next_arrival() const { return jobs_.front().arrival; }

private:
    std::deque<JobRequest> jobs_; // sorted by (arrival, submission order)
};

enum class ViolationKind {
    Overlap,
    OutOfBounds,
    BrokenChain,
    BarrierViolation,
    BadSegment,
};

struct Violation {
    ViolationKind kind;
    JobId a = 0, b = 0;
    std::string detail;
};

std::string to_string(const Violation& v);

/// Full ledger audit: pairwise segment overlap, chip bounds, z-contiguity
/// of every segment chain, and barrier span violations. Returns findings
/// as data; an empty result means the ledger is consistent.
std::vector<Violation> validate(const ScheduleState& state, Coord W, Coord H);

/// Corner-candidate bookkeeping shared by the greedy scheduler and the
/// commit path: consume the origin and deposit the three far-face corners
/// plus the top-of-stack fallback, skipping points outside the chip and
/// points already present.
void apply_placement_to_candidates(std::vector<CornerCandidate>& candidates,
                                   std::uint64_t& next_seq, const PlacedCuboid& p,
                                   Coord W, Coord H);

/// Admits a batch of placements: appends one single-segment job each and
/// updates the candidate set. The caller validates afterwards.
void commit_placements(ScheduleState& state, std::span<const PlacedCuboid> placements,
                       Coord W, Coord H);

/// Interface both schedulers implement: map a batch onto positions with
/// start times no earlier than sp, against a read snapshot of the ledger.
class Scheduler {
public:
    virtual ~Scheduler() = default;
    virtual std::vector<PlacedCuboid> schedule_batch(const ScheduleState& state,
                                                     std::span<const JobRequest> batch,
                                                     Step sp) = 0;
    virtual std::string name() const = 0;
};

} // namespace qmp
