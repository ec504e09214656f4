#include "qmp/sim.hpp"

#include "qmp/defrag.hpp"
#include "qmp/greedy.hpp"
#include "qmp/preprocess.hpp"
#include "qmp/serialize.hpp"
#include "qmp/workload.hpp"

#include <doctest.h>
#include <map>

using namespace qmp;

TEST_SUITE_BEGIN("sim");

namespace {

SimConfig zero_latency_config() {
    SimConfig config;
    config.latency = LatencyModel::synthetic(0.0);
    config.defrag_enabled = false;
    return config;
}

std::vector<JobRequest> cuboid_jobs(const std::vector<Cuboid>& shapes) {
    std::vector<JobRequest> requests;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        requests.push_back({static_cast<JobId>(i), shapes[i], 0});
    }
    return requests;
}

} // namespace

TEST_CASE("a single job runs for exactly its length") {
    const SimResult result = run(zero_latency_config(), cuboid_jobs({{5, 5, 100}}));
    CHECK(result.metrics.makespan == 100);
    CHECK(result.metrics.speedup() == 1.0);
}

TEST_CASE("full-chip jobs are forced into a serial schedule") {
    const SimResult result = run(
        zero_latency_config(), cuboid_jobs({{20, 20, 10}, {20, 20, 20}, {20, 20, 5}}));
    CHECK(result.metrics.makespan == 35);
    CHECK(result.metrics.speedup() == 1.0);
}

TEST_CASE("zero latency without defrag reproduces the pure packing") {
    Rng rng(103);
    std::vector<Cuboid> shapes;
    for (int i = 0; i < 40; ++i) {
        shapes.push_back({uniform_int(rng, 1, 15), uniform_int(rng, 1, 15),
                          uniform_int(rng, 5, 60)});
    }
    SimConfig config = zero_latency_config();
    const SimResult result = run(config, cuboid_jobs(shapes));

    ScheduleState state;
    seed_candidates(state);
    const auto requests = cuboid_jobs(shapes);
    for (std::size_t at = 0; at < requests.size(); at += config.batch_size) {
        const std::size_t end = std::min(requests.size(), at + config.batch_size);
        const std::vector<JobRequest> batch(requests.begin() + at, requests.begin() + end);
        const auto placements =
            corner_greedy_schedule(state, batch, 0, config.processor);
        commit_placements(state, placements, 20, 20);
    }
    CHECK(result.metrics.makespan == state.top_z2());
    CHECK(result.metrics.stall_steps == 0);
}

TEST_CASE("a constant synthetic cost prices every cycle the same") {
    SimConfig config;
    config.latency = LatencyModel::synthetic(0.0, 10.0, 0.0); // 10 us per job
    config.defrag_enabled = false;
    std::vector<JobRequest> requests;
    for (int i = 0; i < 15; ++i) requests.push_back({i, Cuboid{5, 5, 100}, 0});
    const SimResult result = run(config, requests);
    CHECK(result.metrics.cycles == 3);
    CHECK(result.metrics.sched_mean_us == doctest::Approx(50.0));
    CHECK(result.metrics.sched_min_us == doctest::Approx(50.0));
    CHECK(result.metrics.sched_max_us == doctest::Approx(50.0));
    CHECK(result.metrics.sched_stddev_us == doctest::Approx(0.0));
}

TEST_CASE("fixed seeds and synthetic latency reproduce runs exactly") {
    Rng rng_a(7), rng_b(7);
    SimConfig config;
    config.latency = LatencyModel::synthetic(100.0, 30.0, 1.0);
    const auto jobs_a = gen_class(WorkloadClass::H, 60, rng_a);
    const auto jobs_b = gen_class(WorkloadClass::H, 60, rng_b);
    const SimResult a = run(config, jobs_a);
    const SimResult b = run(config, jobs_b);
    CHECK(a.metrics.makespan == b.metrics.makespan);
    CHECK(a.metrics.stall_steps == b.metrics.stall_steps);
    CHECK(a.metrics.sched_mean_us == b.metrics.sched_mean_us);
    CHECK(a.metrics.defrag_count == b.metrics.defrag_count);
    CHECK(ledger_to_json(a.state) == ledger_to_json(b.state));
}

TEST_CASE("an overrunning scheduler pauses execution and shifts the future") {
    // Prediction zero, actual cost one million steps: the whole makespan
    // is the pure run plus the stall.
    SimConfig config;
    config.latency = LatencyModel::synthetic(31.0e6);
    config.latency.set_history({0.0});
    config.defrag_enabled = false;
    const SimResult result = run(config, cuboid_jobs({{5, 5, 100}}));
    CHECK(result.metrics.stall_steps == 1'000'000);
    CHECK(result.metrics.makespan == 1'000'100);
    CHECK(result.metrics.speedup() ==
          doctest::Approx(100.0 / 1'000'100.0).epsilon(1e-12));
}

TEST_CASE("speedup times makespan recovers the requested work") {
    Rng rng(107);
    for (const WorkloadClass c : {WorkloadClass::A, WorkloadClass::I}) {
        SimConfig config;
        config.latency = LatencyModel::synthetic(500.0, 100.0, 2.0);
        const auto jobs = gen_class(c, 40, rng);
        Step sum_l = 0;
        for (const JobRequest& j : jobs) sum_l += job_shape(j).l;
        const SimResult result = run(config, jobs);
        CHECK(result.metrics.sum_l == sum_l);
        CHECK(result.metrics.speedup() * static_cast<double>(result.metrics.makespan) ==
              doctest::Approx(static_cast<double>(sum_l)).epsilon(1e-12));
    }
}

TEST_CASE("jobs are not scheduled before they arrive") {
    SimConfig config = zero_latency_config();
    std::vector<JobRequest> requests{{0, Cuboid{5, 5, 10}, 0},
                                     {1, Cuboid{5, 5, 10}, 1000}};
    const SimResult result = run(config, requests);
    const ReservedJob* late = result.state.find_job(1);
    REQUIRE(late != nullptr);
    CHECK(late->z1() >= 1000);
    CHECK(result.metrics.cycles == 2);
}

TEST_CASE("oversized jobs fail up front") {
    CHECK_THROWS_AS(run(zero_latency_config(), cuboid_jobs({{25, 25, 10}})),
                    SimulationError);
}

TEST_CASE("degenerate configurations are rejected") {
    SimConfig config = zero_latency_config();
    config.batch_size = 0;
    CHECK_THROWS_AS(run(config, cuboid_jobs({{5, 5, 10}})), SimulationError);
    config.batch_size = 5;
    config.defrag_interval = 0;
    CHECK_THROWS_AS(run(config, cuboid_jobs({{5, 5, 10}})), SimulationError);
}

namespace {

class SpProbe final : public Scheduler {
public:
    explicit SpProbe(ProcessorConfig proc) : inner_(proc) {}
    std::vector<PlacedCuboid> schedule_batch(const ScheduleState& state,
                                             std::span<const JobRequest> batch,
                                             Step sp) override {
        seen.push_back(sp);
        return inner_.schedule_batch(state, batch, sp);
    }
    std::string name() const override { return "probe"; }
    std::vector<Step> seen;

private:
    CornerGreedyScheduler inner_;
};

} // namespace

TEST_CASE("announced schedule points never move backwards") {
    // A large stale sample dominates the first estimate; the cheap cycles
    // that follow would shrink it if the coordinator let them.
    SimConfig config;
    config.latency = LatencyModel::synthetic(0.0);
    config.latency.set_history({10000.0});
    config.defrag_enabled = false;
    SpProbe probe(config.processor);
    std::vector<JobRequest> requests;
    for (int i = 0; i < 15; ++i) requests.push_back({i, Cuboid{1, 1, 10}, 0});
    run(config, requests, probe);
    REQUIRE(probe.seen.size() == 3);
    CHECK(probe.seen[0] == 323); // ceil(10000 / 31)
    for (std::size_t i = 1; i < probe.seen.size(); ++i) {
        CHECK(probe.seen[i] >= probe.seen[i - 1]);
    }
}

namespace {

class CollidingScheduler final : public Scheduler {
public:
    std::vector<PlacedCuboid> schedule_batch(const ScheduleState&,
                                             std::span<const JobRequest> batch,
                                             Step sp) override {
        std::vector<PlacedCuboid> placements;
        for (const JobRequest& request : batch) {
            const Cuboid shape = job_shape(request);
            placements.push_back({request.id, 0, 0, sp, shape.w, shape.h, shape.l});
        }
        return placements;
    }
    std::string name() const override { return "colliding"; }
};

} // namespace

TEST_CASE("ledger violations abort the run with a report") {
    CollidingScheduler bad;
    SimConfig config = zero_latency_config();
    auto requests = cuboid_jobs({{5, 5, 10}, {5, 5, 10}});
    CHECK_THROWS_AS(run(config, requests, bad), SimulationError);
}

TEST_CASE("idle-time insertion keeps chains contiguous and disjoint") {
    ScheduleState state;
    state.reserved.push_back({0, {{0, 0, 0, 0, 2, 2, 10}, {0, 3, 3, 10, 2, 2, 10}}});
    state.reserved.push_back({1, {{1, 5, 5, 12, 2, 2, 10}}});
    state.candidates.push_back({0, 0, 12, 0});
    state.barriers.push_back({15, {{0, 0, 1, 1}}});

    insert_idle_time(state, 11, 4);
    // The straddling segment stretches; everything at or above 11 shifts.
    CHECK(state.reserved[0].segments[0] == PlacedCuboid{0, 0, 0, 0, 2, 2, 10});
    CHECK(state.reserved[0].segments[1] == PlacedCuboid{0, 3, 3, 10, 2, 2, 14});
    CHECK(state.reserved[1].segments[0] == PlacedCuboid{1, 5, 5, 16, 2, 2, 10});
    CHECK(state.candidates[0].z == 16);
    CHECK(state.barriers[0].t == 19);
    CHECK(validate(state, 20, 20).empty());
}

TEST_CASE("spread arrivals with noisy predictions stay consistent") {
    // Costs grow with the reserved count, so the windowed estimate lags
    // and stalls occur; arrivals trickle in instead of landing at zero.
    Rng rng(191);
    for (int trial = 0; trial < 10; ++trial) {
        SimConfig config;
        config.latency = LatencyModel::synthetic(200.0, 40.0, 25.0);
        config.defrag_interval = 500;
        std::vector<JobRequest> requests;
        const int jobs = static_cast<int>(uniform_int(rng, 10, 40));
        for (int i = 0; i < jobs; ++i) {
            requests.push_back({i,
                                Cuboid{uniform_int(rng, 1, 15), uniform_int(rng, 1, 15),
                                       uniform_int(rng, 20, 400)},
                                uniform_int(rng, 0, 600)});
        }
        const SimResult result = run(config, requests);
        CHECK(validate(result.state, 20, 20).empty());
        CHECK(result.state.reserved.size() == static_cast<std::size_t>(jobs));
        for (const JobRequest& request : requests) {
            const ReservedJob* job = result.state.find_job(request.id);
            REQUIRE(job != nullptr);
            CHECK(job->z1() >= request.arrival);
        }
        // Bit-identical rerun.
        const SimResult again = run(config, requests);
        CHECK(again.metrics.makespan == result.metrics.makespan);
        CHECK(again.metrics.stall_steps == result.metrics.stall_steps);
    }
}

TEST_CASE("polycube programs are packed by their bounding boxes") {
    Rng rng(193);
    SimConfig config = zero_latency_config();
    std::vector<JobRequest> requests;
    Step sum_l = 0;
    for (int i = 0; i < 8; ++i) {
        const Polycube program = gen_polycube(static_cast<int>(uniform_int(rng, 1, 30)), rng);
        sum_l += bounding_cuboid(program).l;
        requests.push_back({i, program, 0});
    }
    const SimResult result = run(config, requests);
    CHECK(result.metrics.sum_l == sum_l);
    CHECK(validate(result.state, 20, 20).empty());
    for (const JobRequest& request : requests) {
        const ReservedJob* job = result.state.find_job(request.id);
        REQUIRE(job != nullptr);
        const Cuboid box = bounding_cuboid(std::get<Polycube>(request.program));
        const PlacedCuboid& s = job->segments.front();
        const bool plain = s.w == box.w && s.h == box.h;
        const bool turned = s.w == box.h && s.h == box.w;
        CHECK((plain || turned));
        CHECK(job->total_length() == box.l);
    }
}

TEST_CASE("random idle insertions preserve a packed ledger") {
    Rng rng(197);
    for (int trial = 0; trial < 20; ++trial) {
        ScheduleState state;
        seed_candidates(state);
        std::vector<JobRequest> batch;
        for (int i = 0; i < 10; ++i) {
            batch.push_back({i,
                             Cuboid{uniform_int(rng, 1, 10), uniform_int(rng, 1, 10),
                                    uniform_int(rng, 5, 60)},
                             0});
        }
        const ProcessorConfig proc{20, 20, 1.0, 31};
        commit_placements(state, corner_greedy_schedule(state, batch, 0, proc), 20, 20);
        const Step top = state.top_z2();
        defrag_at(state, uniform_int(rng, 1, top - 1), 20, 20);
        REQUIRE(validate(state, 20, 20).empty());

        std::map<JobId, Step> lengths;
        for (const ReservedJob& job : state.reserved) {
            lengths[job.id] = job.total_length();
        }
        const Step t = uniform_int(rng, 0, top + 5);
        const Step amount = uniform_int(rng, 1, 50);
        insert_idle_time(state, t, amount);
        CHECK(validate(state, 20, 20).empty());
        for (const ReservedJob& job : state.reserved) {
            CHECK(job.total_length() >= lengths[job.id]);
        }
    }
}

TEST_CASE("relocation cost inserts idle steps at each pass") {
    SimConfig config;
    config.latency = LatencyModel::synthetic(0.0);
    config.defrag_enabled = true;
    config.defrag_interval = 100;
    config.relocation_cost_steps = 7;
    // Side-by-side long and short jobs; at the short job's finish the gap
    // to the long one's finish exceeds the interval, so the long job's
    // upper part is pulled across and everything pauses for seven steps.
    std::vector<JobRequest> requests{{0, Cuboid{10, 20, 50}, 0},
                                     {1, Cuboid{10, 20, 500}, 0},
                                     {2, Cuboid{5, 5, 30}, 40}};
    const SimResult result = run(config, requests);
    CHECK(result.metrics.defrag_count == 1);
    const ReservedJob* moved = result.state.find_job(1);
    REQUIRE(moved != nullptr);
    CHECK(moved->z2() == 507);
    CHECK(validate(result.state, 20, 20).empty());
}

TEST_SUITE_END();
