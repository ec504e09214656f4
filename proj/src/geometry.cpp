#include "qmp/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace qmp {

Polycube::Polycube(std::vector<Voxel> voxels) : voxels_(std::move(voxels)) {
    for (const Voxel& v : voxels_) {
        if (v.x < 0 || v.y < 0 || v.z < 0) {
            throw std::invalid_argument("polycube voxel with negative coordinate");
        }
    }
    std::sort(voxels_.begin(), voxels_.end());
    voxels_.erase(std::unique(voxels_.begin(), voxels_.end()), voxels_.end());
}

Voxel Polycube::min_corner() const {
    Voxel m = voxels_.front();
    for (const Voxel& v : voxels_) {
        m.x = std::min(m.x, v.x);
        m.y = std::min(m.y, v.y);
        m.z = std::min(m.z, v.z);
    }
    return m;
}

Voxel Polycube::max_corner() const {
    Voxel m = voxels_.front();
    for (const Voxel& v : voxels_) {
        m.x = std::max(m.x, v.x);
        m.y = std::max(m.y, v.y);
        m.z = std::max(m.z, v.z);
    }
    return m;
}

bool overlaps(const PlacedCuboid& a, const PlacedCuboid& b) {
    return a.x < b.x2() && b.x < a.x2() && a.y < b.y2() && b.y < a.y2() &&
           a.z < b.z2() && b.z < a.z2();
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

bool polycubes_overlap(const PlacedPolycube& a, const PlacedPolycube& b) {
    const auto& small = a.shape.size() <= b.shape.size() ? a : b;
    const auto& large = a.shape.size() <= b.shape.size() ? b : a;
    std::unordered_set<Voxel, VoxelHash> cells;
    cells.reserve(small.shape.size() * 2);
    for (const Voxel& v : small.shape.voxels()) {
        cells.insert({v.x + small.x, v.y + small.y, v.z + small.z});
    }
    for (const Voxel& v : large.shape.voxels()) {
        if (cells.count({v.x + large.x, v.y + large.y, v.z + large.z})) return true;
    }
    return false;
}

Polycube transform_polycube(const Polycube& p, Transform t) {
    std::vector<Voxel> out;
    out.reserve(p.size());
    for (const Voxel& v : p.voxels()) {
        Coord x = v.x, y = v.y;
        if (t.rotation == Rotation::R90) {
            Coord nx = -y, ny = x;
            x = nx;
            y = ny;
        }
        if (t.flip) x = -x;
        out.push_back({x, y, v.z});
    }
    Coord min_x = 0, min_y = 0;
    if (!out.empty()) {
        min_x = out.front().x;
        min_y = out.front().y;
        for (const Voxel& v : out) {
            min_x = std::min(min_x, v.x);
            min_y = std::min(min_y, v.y);
        }
    }
    for (Voxel& v : out) {
        v.x -= min_x;
        v.y -= min_y;
    }
    return Polycube(std::move(out));
}

} // namespace qmp
