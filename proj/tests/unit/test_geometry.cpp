#include "qmp/geometry.hpp"
#include "qmp/preprocess.hpp"
#include "qmp/workload.hpp"

#include <stdexcept>
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

using namespace qmp;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("touching faces do not overlap") {
    const PlacedCuboid a{0, 0, 0, 0, 1, 1, 1};
    const PlacedCuboid b{1, 0, 0, 1, 1, 1, 1};
    CHECK_FALSE(overlaps(a, b));
}

TEST_CASE("corner intersection overlaps") {
    const PlacedCuboid a{0, 0, 0, 0, 2, 2, 2};
    const PlacedCuboid b{1, 1, 1, 1, 2, 2, 2};
    CHECK(overlaps(a, b));
}

TEST_CASE("abutting in x does not overlap") {
    const PlacedCuboid a{0, 0, 0, 0, 5, 10, 100};
    const PlacedCuboid b{1, 5, 0, 0, 5, 10, 100};
    CHECK_FALSE(overlaps(a, b));
}

TEST_CASE("overlap is symmetric") {
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        const PlacedCuboid a{0, uniform_int(rng, 0, 8), uniform_int(rng, 0, 8),
                             uniform_int(rng, 0, 8), uniform_int(rng, 1, 4),
                             uniform_int(rng, 1, 4), uniform_int(rng, 1, 4)};
        const PlacedCuboid b{1, uniform_int(rng, 0, 8), uniform_int(rng, 0, 8),
                             uniform_int(rng, 0, 8), uniform_int(rng, 1, 4),
                             uniform_int(rng, 1, 4), uniform_int(rng, 1, 4)};
        CHECK(overlaps(a, b) == overlaps(b, a));
    }
}

TEST_CASE("polycube stores sorted unique voxels and rejects negatives") {
    const Polycube p({{1, 0, 0}, {0, 0, 0}, {1, 0, 0}});
    CHECK(p.size() == 2);
    CHECK(std::is_sorted(p.voxels().begin(), p.voxels().end()));
    CHECK_THROWS_AS(Polycube({{-1, 0, 0}}), std::invalid_argument);
}

TEST_CASE("quarter turn maps a row onto a column") {
    const Polycube p({{0, 0, 0}, {1, 0, 0}});
    const Polycube turned = transform_polycube(p, {Rotation::R90, false});
    CHECK(turned == Polycube({{0, 0, 0}, {0, 1, 0}}));
}

TEST_CASE("identity transform is a no-op") {
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        const Polycube p = gen_polycube(static_cast<int>(uniform_int(rng, 1, 12)), rng);
        CHECK(transform_polycube(p, {Rotation::R0, false}) == p);
    }
}

TEST_CASE("mirror matches an independent coordinate map") {
    // Mirroring reverses x; after renormalization that is x -> max_x - x.
    const Polycube p({{0, 0, 0}, {2, 0, 0}, {2, 1, 0}});
    const Polycube flipped = transform_polycube(p, {Rotation::R0, true});
    std::vector<Voxel> expected;
    const Coord max_x = p.max_corner().x;
    for (const Voxel& v : p.voxels()) expected.push_back({max_x - v.x, v.y, v.z});
    CHECK(flipped == Polycube(expected));
    CHECK(flipped == Polycube({{0, 0, 0}, {0, 1, 0}, {2, 0, 0}}));

    Rng rng(13);
    for (int i = 0; i < 50; ++i) {
        const Polycube q = gen_polycube(static_cast<int>(uniform_int(rng, 1, 15)), rng);
        const Coord mx = q.max_corner().x;
        std::vector<Voxel> mapped;
        for (const Voxel& v : q.voxels()) mapped.push_back({mx - v.x, v.y, v.z});
        CHECK(transform_polycube(q, {Rotation::R0, true}) == Polycube(mapped));
    }
}

TEST_CASE("transform preserves voxel count and z multiset") {
    Rng rng(17);
    for (int i = 0; i < 50; ++i) {
        const Polycube p = gen_polycube(static_cast<int>(uniform_int(rng, 1, 20)), rng);
        const Transform t{uniform_int(rng, 0, 1) ? Rotation::R90 : Rotation::R0,
                          uniform_int(rng, 0, 1) == 1};
        const Polycube q = transform_polycube(p, t);
        CHECK(q.size() == p.size());
        std::multiset<Coord> pz, qz;
        for (const Voxel& v : p.voxels()) pz.insert(v.z);
        for (const Voxel& v : q.voxels()) qz.insert(v.z);
        CHECK(pz == qz);
    }
}

TEST_CASE("four quarter turns and double mirrors are identities") {
    Rng rng(19);
    for (int i = 0; i < 30; ++i) {
        const Polycube p = gen_polycube(static_cast<int>(uniform_int(rng, 1, 16)), rng);
        Polycube turned = p;
        for (int k = 0; k < 4; ++k) {
            turned = transform_polycube(turned, {Rotation::R90, false});
        }
        CHECK(turned == p);
        const Polycube mirrored =
            transform_polycube(transform_polycube(p, {Rotation::R0, true}),
                               {Rotation::R0, true});
        CHECK(mirrored == p);
    }
}

TEST_CASE("disjoint voxel sets do not collide") {
    const PlacedPolycube l{Polycube({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), 0, 0, 0};
    const PlacedPolycube corner{Polycube({{0, 0, 0}}), 1, 1, 0};
    CHECK_FALSE(polycubes_overlap(l, corner));
    CHECK(polycubes_overlap(l, PlacedPolycube{l.shape, 0, 0, 0}));
}

namespace {

bool quadratic_voxel_clash(const PlacedPolycube& a, const PlacedPolycube& b) {
    for (const Voxel& va : a.shape.voxels()) {
        for (const Voxel& vb : b.shape.voxels()) {
            if (va.x + a.x == vb.x + b.x && va.y + a.y == vb.y + b.y &&
                va.z + a.z == vb.z + b.z) {
                return true;
            }
        }
    }
    return false;
}

} // namespace

TEST_CASE("voxel collision agrees with the quadratic oracle") {
    Rng rng(23);
    for (int i = 0; i < 50; ++i) {
        const PlacedPolycube a{gen_polycube(static_cast<int>(uniform_int(rng, 1, 10)), rng),
                               uniform_int(rng, 0, 3), uniform_int(rng, 0, 3),
                               uniform_int(rng, 0, 3)};
        const PlacedPolycube b{gen_polycube(static_cast<int>(uniform_int(rng, 1, 10)), rng),
                               uniform_int(rng, 0, 3), uniform_int(rng, 0, 3),
                               uniform_int(rng, 0, 3)};
        CHECK(polycubes_overlap(a, b) == quadratic_voxel_clash(a, b));
    }
}

TEST_CASE("bounding boxes are conservative for voxel collisions") {
    Rng rng(29);
    for (int i = 0; i < 1000; ++i) {
        const PlacedPolycube a{gen_polycube(static_cast<int>(uniform_int(rng, 1, 12)), rng),
                               uniform_int(rng, 0, 5), uniform_int(rng, 0, 5),
                               uniform_int(rng, 0, 5)};
        const PlacedPolycube b{gen_polycube(static_cast<int>(uniform_int(rng, 1, 12)), rng),
                               uniform_int(rng, 0, 5), uniform_int(rng, 0, 5),
                               uniform_int(rng, 0, 5)};
        const Cuboid ba = bounding_cuboid(a.shape);
        const Cuboid bb = bounding_cuboid(b.shape);
        const PlacedCuboid box_a{0, a.x, a.y, a.z, ba.w, ba.h, ba.l};
        const PlacedCuboid box_b{1, b.x, b.y, b.z, bb.w, bb.h, bb.l};
        if (!overlaps(box_a, box_b)) CHECK_FALSE(polycubes_overlap(a, b));
    }
}

TEST_SUITE_END();
