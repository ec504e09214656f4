#pragma once

#include "qmp/geometry.hpp"

namespace qmp {

/// Minimum bounding box of a polycube. Throws on an empty program.
Cuboid bounding_cuboid(const Polycube& p);

/// One z-band of a split program: the band's bounding box and the band's
/// start offset relative to the program's first time step.
struct CuboidSegment {
    Cuboid box;
    Step z_offset = 0;

    friend bool operator==(const CuboidSegment&, const CuboidSegment&) = default;
};

/// Splits a program into k contiguous z-bands of near-equal depth (earlier
/// bands take the remainder) and boxes each band. Band lengths always cover
/// the band's full depth, so the segment lengths sum to the z-extent of p.
/// A band that happens to contain no voxels gets a 1x1 footprint.
/// Throws "over-split" when k exceeds the z-extent.
std::vector<CuboidSegment> k_split(const Polycube& p, int k);

} // namespace qmp
