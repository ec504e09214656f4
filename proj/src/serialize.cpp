#include "qmp/serialize.hpp"

#include <sstream>

namespace qmp {

void to_json(nlohmann::json& j, const Polycube& p) {
    j = nlohmann::json::array();
    for (const Voxel& v : p.voxels()) j.push_back({v.x, v.y, v.z});
}

void from_json(const nlohmann::json& j, Polycube& p) {
    std::vector<Voxel> voxels;
    voxels.reserve(j.size());
    for (const auto& triple : j) {
        if (!triple.is_array() || triple.size() != 3) {
            throw std::invalid_argument("voxel must be an [x,y,z] triple");
        }
        voxels.push_back({triple[0].get<Coord>(), triple[1].get<Coord>(),
                          triple[2].get<Coord>()});
    }
    p = Polycube(std::move(voxels));
}

void to_json(nlohmann::json& j, const Cuboid& c) {
    j = {{"w", c.w}, {"h", c.h}, {"l", c.l}};
}

void from_json(const nlohmann::json& j, Cuboid& c) {
    c.w = j.at("w").get<Coord>();
    c.h = j.at("h").get<Coord>();
    c.l = j.at("l").get<Step>();
    if (c.w < 1 || c.h < 1 || c.l < 1) {
        throw std::invalid_argument("cuboid dimensions must be positive");
    }
}

void to_json(nlohmann::json& j, const PlacedCuboid& p) {
    j = {{"id", p.id}, {"x", p.x}, {"y", p.y}, {"z", p.z},
         {"w", p.w},   {"h", p.h}, {"l", p.l}};
}

void from_json(const nlohmann::json& j, PlacedCuboid& p) {
    p.id = j.at("id").get<JobId>();
    p.x = j.at("x").get<Coord>();
    p.y = j.at("y").get<Coord>();
    p.z = j.at("z").get<Step>();
    p.w = j.at("w").get<Coord>();
    p.h = j.at("h").get<Coord>();
    p.l = j.at("l").get<Step>();
}

nlohmann::json workload_to_json(const WorkloadFile& w) {
    nlohmann::json requests = nlohmann::json::array();
    for (const JobRequest& r : w.requests) {
        const Cuboid shape = job_shape(r);
        requests.push_back({{"id", r.id},
                            {"w", shape.w},
                            {"h", shape.h},
                            {"l", shape.l},
                            {"arrival", r.arrival}});
    }
    return {{"seed", w.seed}, {"class", w.job_class}, {"requests", requests}};
}

WorkloadFile workload_from_json(const nlohmann::json& j) {
    WorkloadFile w;
    w.seed = j.value("seed", std::uint64_t{0});
    w.job_class = j.value("class", std::string{"custom"});
    for (const auto& r : j.at("requests")) {
        Cuboid shape{r.at("w").get<Coord>(), r.at("h").get<Coord>(),
                     r.at("l").get<Step>()};
        if (shape.w < 1 || shape.h < 1 || shape.l < 1) {
            throw std::invalid_argument("request dimensions must be positive");
        }
        w.requests.push_back({r.at("id").get<JobId>(), shape,
                              r.value("arrival", Step{0})});
    }
    return w;
}

nlohmann::json ledger_to_json(const ScheduleState& state) {
    nlohmann::json jobs = nlohmann::json::array();
    for (const ReservedJob& job : state.reserved) {
        nlohmann::json segments = nlohmann::json::array();
        for (const PlacedCuboid& s : job.segments) {
            segments.push_back({{"x", s.x},
                                {"y", s.y},
                                {"z", s.z},
                                {"w", s.w},
                                {"h", s.h},
                                {"l", s.l}});
        }
        jobs.push_back({{"id", job.id}, {"segments", segments}});
    }
    return {{"jobs", jobs}, {"makespan", state.top_z2()}};
}

nlohmann::json defrag_event_to_json(const DefragEvent& event) {
    nlohmann::json moved = nlohmann::json::array();
    for (const DefragMove& m : event.moved) {
        moved.push_back({{"id", m.id},
                         {"from", {m.from_x, m.from_y}},
                         {"to", {m.to_x, m.to_y}}});
    }
    return {{"t", event.t}, {"moved", moved}};
}

nlohmann::json metrics_to_json(const MetricsReport& metrics, const std::string& job_class,
                               std::uint64_t seed, const std::string& scheduler,
                               bool defrag_enabled, std::size_t jobs) {
    return {{"class", job_class},
            {"seed", seed},
            {"scheduler", scheduler},
            {"defrag", defrag_enabled},
            {"jobs", jobs},
            {"makespan", metrics.makespan},
            {"sum_l", metrics.sum_l},
            {"speedup", metrics.speedup()},
            {"cycles", metrics.cycles},
            {"sched_mean_us", metrics.sched_mean_us},
            {"sched_min_us", metrics.sched_min_us},
            {"sched_max_us", metrics.sched_max_us},
            {"sched_stddev_us", metrics.sched_stddev_us},
            {"stall_steps", metrics.stall_steps},
            {"defrag_count", metrics.defrag_count}};
}

std::string csv_header() {
    return "class,seed,scheduler,defrag,jobs,makespan,sum_l,speedup,cycles,"
           "sched_mean_us,sched_min_us,sched_max_us,sched_stddev_us,"
           "stall_steps,defrag_count";
}

std::string csv_row(const MetricsReport& metrics, const std::string& job_class,
                    std::uint64_t seed, const std::string& scheduler,
                    bool defrag_enabled, std::size_t jobs) {
    std::ostringstream out;
    out << job_class << ',' << seed << ',' << scheduler << ','
        << (defrag_enabled ? 1 : 0) << ',' << jobs << ',' << metrics.makespan << ','
        << metrics.sum_l << ',' << metrics.speedup() << ',' << metrics.cycles << ','
        << metrics.sched_mean_us << ',' << metrics.sched_min_us << ','
        << metrics.sched_max_us << ',' << metrics.sched_stddev_us << ','
        << metrics.stall_steps << ',' << metrics.defrag_count;
    return out.str();
}

} // namespace qmp
