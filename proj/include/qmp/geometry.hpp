#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace qmp {

using Coord = std::int64_t; // lattice coordinate, in logical patches
using Step = std::int64_t;  // logical time step (one step = d code cycles)
using JobId = std::int64_t;

inline Step ceil_div(Step a, Step b) { return (a + b - 1) / b; }

/// One occupied unit cell of a program in space-time; z is the time axis.
struct Voxel {
    Coord x = 0, y = 0, z = 0;
    friend auto operator<=>(const Voxel&, const Voxel&) = default;
};

/// A program shape: a finite voxel set, stored sorted and deduplicated.
/// Coordinates must be non-negative. Face-connectivity is not required.
class Polycube {
public:
    Polycube() = default;
    explicit Polycube(std::vector<Voxel> voxels);

    const std::vector<Voxel>& voxels() const { return voxels_; }
    bool empty() const { return voxels_.empty(); }
    std::size_t size() const { return voxels_.size(); }

    // Both require a non-empty polycube.
    Voxel min_corner() const;
    Voxel max_corner() const;

    friend bool operator==(const Polycube&, const Polycube&) = default;

private:
    std::vector<Voxel> voxels_;
};

/// Axis-aligned box dimensions; w,h span the chip plane, l is the duration.
struct Cuboid {
    Coord w = 1, h = 1, l = 1;

    Coord footprint() const { return w * h; }
    Coord volume() const { return w * h * l; }

    friend bool operator==(const Cuboid&, const Cuboid&) = default;
};

/// In-plane placement freedom: a quarter turn about the time axis plus an
/// optional mirror. Time itself is never rotated.
enum class Rotation : std::uint8_t { R0, R90 };

struct Transform {
    Rotation rotation = Rotation::R0;
    bool flip = false; // mirror by reversing the x direction
};

/// Box dimensions after an in-plane quarter turn.
inline Cuboid oriented(const Cuboid& c, Rotation r) {
    return r == Rotation::R90 ? Cuboid{c.h, c.w, c.l} : c;
}

/// A placed job segment. Occupies the half-open box
/// [x, x+w) x [y, y+h) x [z, z+l), so abutting segments never overlap.
struct PlacedCuboid {
    JobId id = 0;
    Coord x = 0, y = 0;
    Step z = 0;
    Coord w = 1, h = 1;
    Step l = 1;

    Coord x2() const { return x + w; }
    Coord y2() const { return y + h; }
    Step z2() const { return z + l; }
    Coord volume() const { return w * h * l; }

    friend bool operator==(const PlacedCuboid&, const PlacedCuboid&) = default;
};

/// True iff the half-open extents intersect on all three axes.
bool overlaps(const PlacedCuboid& a, const PlacedCuboid& b);

/// A polycube translated to an integer offset.
struct PlacedPolycube {
    Polycube shape;
    Coord x = 0, y = 0;
    Step z = 0;
};

/// True iff the translated voxel sets share at least one cell.
bool polycubes_overlap(const PlacedPolycube& a, const PlacedPolycube& b);

/// Applies the in-plane transform (rotation first, then mirror) and
/// renormalizes so the minimum coordinate on each axis is zero.
/// z-coordinates are preserved; the voxel count is preserved.
Polycube transform_polycube(const Polycube& p, Transform t);

} // namespace qmp
