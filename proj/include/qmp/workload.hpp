#pragma once

#include "qmp/sched_core.hpp"

#include <array>
#include <random>
#include <string>

namespace qmp {

using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi], inclusive. Hand-rolled rejection sampling
/// so generated instances are identical across standard libraries.
Coord uniform_int(Rng& rng, Coord lo, Coord hi);

/// The six request shapes: small or large chip footprint crossed with
/// short, medium and long durations. Large footprints are constrained to
/// an area between 101 and 200 patches.
enum class JobType { G1, G2, G3, G4, G5, G6 };

struct JobTypeSpec {
    Coord side_lo, side_hi; // w and h range
    Step length_lo, length_hi;
    bool area_constrained; // keep 101 <= w*h <= 200 by rejection
};

const JobTypeSpec& type_spec(JobType t);

/// Draws one cuboid of the given type.
Cuboid gen_type(JobType t, Rng& rng);

/// Request mixes: one dominant type (A-F), uniform (G), mostly small
/// footprints (H) or mostly large footprints (I).
enum class WorkloadClass { A, B, C, D, E, F, G, H, I };

std::string to_string(WorkloadClass c);
WorkloadClass workload_class_from(const std::string& name);

/// Integer mixture weights per type, in thirtieths.
std::array<int, 6> class_weights(WorkloadClass c);

/// Draws n requests i.i.d. from the class mixture, all arriving at 0.
std::vector<JobRequest> gen_class(WorkloadClass c, int n, Rng& rng);

/// Face-connected polycube of exactly `volume` voxels grown by uniform
/// frontier expansion, renormalized to the origin.
Polycube gen_polycube(int volume, Rng& rng);

/// Stream-splitting helper: a per-instance seed derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

} // namespace qmp
