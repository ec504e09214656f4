#include "qmp/workload.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace qmp {

Coord uniform_int(Rng& rng, Coord lo, Coord hi) {
    if (lo > hi) throw std::invalid_argument("empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<Coord>(rng()); // full 64-bit range
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    return lo + static_cast<Coord>(draw % span);
}

const JobTypeSpec& type_spec(JobType t) {
    static const JobTypeSpec specs[6] = {
        {5, 10, 10000, 20000, false},   // G1
        {5, 10, 40000, 60000, false},   // G2
        {5, 10, 80000, 100000, false},  // G3
        {10, 20, 10000, 20000, true},   // G4
        {10, 20, 40000, 60000, true},   // G5
        {10, 20, 80000, 100000, true},  // G6
    };
    return specs[static_cast<int>(t)];
}

Cuboid gen_type(JobType t, Rng& rng) {
    const JobTypeSpec& spec = type_spec(t);
    Coord w = 0, h = 0;
    do {
        w = uniform_int(rng, spec.side_lo, spec.side_hi);
        h = uniform_int(rng, spec.side_lo, spec.side_hi);
    } while (spec.area_constrained && !(101 <= w * h && w * h <= 200));
    const Step l = uniform_int(rng, spec.length_lo, spec.length_hi);
    return Cuboid{w, h, l};
}

std::string to_string(WorkloadClass c) {
    return std::string(1, static_cast<char>('A' + static_cast<int>(c)));
}

WorkloadClass workload_class_from(const std::string& name) {
    if (name.size() == 1 && name[0] >= 'A' && name[0] <= 'I') {
        return static_cast<WorkloadClass>(name[0] - 'A');
    }
    if (name.size() == 1 && name[0] >= 'a' && name[0] <= 'i') {
        return static_cast<WorkloadClass>(name[0] - 'a');
    }
    throw std::invalid_argument("unknown workload class '" + name + "'");
}

std::array<int, 6> class_weights(WorkloadClass c) {
    // In thirtieths, so the uneven mixes stay exact.
    switch (c) {
    case WorkloadClass::A: return {15, 3, 3, 3, 3, 3};
    case WorkloadClass::B: return {3, 15, 3, 3, 3, 3};
    case WorkloadClass::C: return {3, 3, 15, 3, 3, 3};
    case WorkloadClass::D: return {3, 3, 3, 15, 3, 3};
    case WorkloadClass::E: return {3, 3, 3, 3, 15, 3};
    case WorkloadClass::F: return {3, 3, 3, 3, 3, 15};
    case WorkloadClass::G: return {5, 5, 5, 5, 5, 5};
    case WorkloadClass::H: return {9, 9, 9, 1, 1, 1};
    case WorkloadClass::I: return {1, 1, 1, 9, 9, 9};
    }
    throw std::invalid_argument("unknown workload class");
}

std::vector<JobRequest> gen_class(WorkloadClass c, int n, Rng& rng) {
    const std::array<int, 6> weights = class_weights(c);
    int total = 0;
    for (int w : weights) total += w;

    std::vector<JobRequest> requests;
    requests.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Coord pick = uniform_int(rng, 0, total - 1);
        int type = 0;
        while (pick >= weights[type]) {
            pick -= weights[type];
            ++type;
        }
        requests.push_back(
            {static_cast<JobId>(i), gen_type(static_cast<JobType>(type), rng), 0});
    }
    return requests;
}

namespace {

struct VoxelHash {
    std::size_t operator()(const Voxel& v) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t c : {v.x, v.y, v.z}) {
            h ^= static_cast<std::uint64_t>(c);
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace

Polycube gen_polycube(int volume, Rng& rng) {
    if (volume < 1) throw std::invalid_argument("volume must be positive");

    std::unordered_set<Voxel, VoxelHash> shape;
    std::vector<Voxel> frontier;
    std::unordered_set<Voxel, VoxelHash> in_frontier;

    auto extend = [&](const Voxel& v) {
        static const Coord steps[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                          {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
        for (const auto& d : steps) {
            const Voxel next{v.x + d[0], v.y + d[1], v.z + d[2]};
            if (!shape.count(next) && in_frontier.insert(next).second) {
                frontier.push_back(next);
            }
        }
    };

    Voxel origin{0, 0, 0};
    shape.insert(origin);
    extend(origin);
    while (static_cast<int>(shape.size()) < volume) {
        const std::size_t pick = static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<Coord>(frontier.size()) - 1));
        const Voxel v = frontier[pick];
        frontier[pick] = frontier.back();
        frontier.pop_back();
        in_frontier.erase(v);
        if (shape.count(v)) continue;
        shape.insert(v);
        extend(v);
    }

    std::vector<Voxel> voxels(shape.begin(), shape.end());
    Coord min_x = voxels.front().x, min_y = voxels.front().y, min_z = voxels.front().z;
    for (const Voxel& v : voxels) {
        min_x = std::min(min_x, v.x);
        min_y = std::min(min_y, v.y);
        min_z = std::min(min_z, v.z);
    }
    for (Voxel& v : voxels) {
        v.x -= min_x;
        v.y -= min_y;
        v.z -= min_z;
    }
    return Polycube(std::move(voxels));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 over the combined words
    std::uint64_t x = master + 0x9e3779b97f4a7c15ull * (index + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

} // namespace qmp
