#include "qmp/preprocess.hpp"

#include <algorithm>
#include <stdexcept>

namespace qmp {

Cuboid bounding_cuboid(const Polycube& p) {
    if (p.empty()) throw std::invalid_argument("empty program");
    const Voxel lo = p.min_corner();
    const Voxel hi = p.max_corner();
    return Cuboid{hi.x - lo.x + 1, hi.y - lo.y + 1, hi.z - lo.z + 1};
}

std::vector<CuboidSegment> k_split(const Polycube& p, int k) {
    if (p.empty()) throw std::invalid_argument("empty program");
    if (k < 1) throw std::invalid_argument("k must be positive");
    const Voxel lo = p.min_corner();
    const Voxel hi = p.max_corner();
    const Step extent = hi.z - lo.z + 1;
    if (k > extent) throw std::invalid_argument("over-split");

    const Step base = extent / k;
    const Step remainder = extent % k;

    std::vector<CuboidSegment> segments;
    segments.reserve(static_cast<std::size_t>(k));
    Step band_start = 0; // relative to lo.z
    for (int b = 0; b < k; ++b) {
        const Step depth = base + (b < remainder ? 1 : 0);
        const Step z_from = lo.z + band_start;
        const Step z_to = z_from + depth; // half-open

        bool any = false;
        Coord min_x = 0, max_x = 0, min_y = 0, max_y = 0;
        for (const Voxel& v : p.voxels()) {
            if (v.z < z_from || v.z >= z_to) continue;
            if (!any) {
                min_x = max_x = v.x;
                min_y = max_y = v.y;
                any = true;
            } else {
                min_x = std::min(min_x, v.x);
                max_x = std::max(max_x, v.x);
                min_y = std::min(min_y, v.y);
                max_y = std::max(max_y, v.y);
            }
        }
        const Coord w = any ? max_x - min_x + 1 : 1;
        const Coord h = any ? max_y - min_y + 1 : 1;
        segments.push_back({Cuboid{w, h, depth}, band_start});
        band_start += depth;
    }
    return segments;
}

} // namespace qmp
