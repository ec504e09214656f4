#pragma once

#include "qmp/sched_core.hpp"

#include <chrono>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qmp {

enum class SolveStatus { Optimal, Feasible, TimedOut };

std::string to_string(SolveStatus status);

struct IlpOptions {
    bool allow_rotation = true;
    std::chrono::milliseconds time_limit{2000};
    /// Optional command template invoking an external MILP solver; "{lp}"
    /// and "{sol}" are replaced with the model and solution file paths.
    std::string external_solver;
};

/// The cuboid-packing model: minimize the batch makespan v subject to, for
/// every pair of boxes, a six-way "separated on some axis, in some
/// direction" disjunction realized with big-M rows, plus chip bounds and
/// per-job makespan linkage. Already-reserved segments join as boxes whose
/// coordinates are constants; relocation barriers join as zero-length
/// planes that no free job may span. Pairs of two constant boxes need no
/// variables, so the binary count stays O((n+m)^2 - m^2) and never depends
/// on the chip or horizon size.
class IlpModel {
public:
    struct FreeJob {
        Coord w = 1, h = 1;
        Step l = 1;
        bool rotatable = false;
    };
    /// A constant box. l == 0 marks a relocation plane at z.
    struct FixedBox {
        Coord x = 0, y = 0;
        Step z = 0;
        Coord w = 1, h = 1;
        Step l = 1;
    };
    /// Binary separation variables for one unordered pair of boxes.
    struct PairVars {
        int gi = 0, gj = 0; // global box indices, gi < gj, at least one free
        int a_ij = -1, a_ji = -1, b_ij = -1, b_ji = -1, c_ij = -1, c_ji = -1;
    };

    struct Var {
        std::string name;
        bool binary = false;
        Step lower = 0; // inclusive lower bound for general integers
    };
    struct Row {
        std::string name;
        std::vector<std::pair<int, double>> terms;
        char sense = 'L'; // 'L' <=, 'G' >=
        double rhs = 0.0;
    };

    const std::vector<FreeJob>& free_jobs() const { return free_; }
    const std::vector<FixedBox>& fixed_boxes() const { return fixed_; }
    const std::vector<PairVars>& pairs() const { return pairs_; }
    Coord chip_w() const { return W_; }
    Coord chip_h() const { return H_; }
    Step big_l() const { return big_l_; }
    Step schedule_point() const { return sp_; }

    const std::vector<Var>& vars() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }
    int objective_var() const { return v_index_; }
    int x_index(int job) const { return 3 * job; }
    int y_index(int job) const { return 3 * job + 1; }
    int z_index(int job) const { return 3 * job + 2; }
    int rotation_index(int job) const { return rotation_index_[job]; } // -1 if none
    int var_index(std::string_view name) const;                       // -1 if unknown

    std::size_t binary_count() const;

    /// Box index helpers: boxes 0..n-1 are free jobs, n.. are fixed.
    bool is_free(int g) const { return g < static_cast<int>(free_.size()); }

    friend IlpModel build_model(std::span<const Cuboid>, std::span<const PlacedCuboid>,
                                std::span<const DefragBarrier>, Step,
                                const ProcessorConfig&, const IlpOptions&);

private:
    std::vector<FreeJob> free_;
    std::vector<FixedBox> fixed_;
    std::vector<PairVars> pairs_;
    std::vector<int> rotation_index_;
    Coord W_ = 0, H_ = 0;
    Step big_l_ = 0;
    Step sp_ = 0;
    int v_index_ = -1;
    std::vector<Var> vars_;
    std::vector<Row> rows_;
};

/// Builds the model for a batch against the given reserved segments and
/// barrier planes. Throws when a batch job fits the chip in no allowed
/// orientation ("job cannot fit").
IlpModel build_model(std::span<const Cuboid> batch, std::span<const PlacedCuboid> fixed,
                     std::span<const DefragBarrier> barriers, Step sp,
                     const ProcessorConfig& proc, const IlpOptions& opts);

struct IlpResult {
    std::vector<PlacedCuboid> placements; // ids are free-job indices
    Step makespan = 0;
    SolveStatus status = SolveStatus::TimedOut;
    std::uint64_t nodes = 0;
};

/// Depth-first branch and bound over the separation binaries with interval
/// propagation on the positions. Seeds the incumbent with a naive stack at
/// (0, 0, top), so a placement is always returned; Optimal is reported only
/// when the tree was exhausted within the time limit.
IlpResult solve_exact(const IlpModel& model, std::chrono::milliseconds time_limit);

/// The naive always-feasible placement: batch order, stacked at
/// (0, 0, max(sp, top of the fixed boxes)).
std::vector<PlacedCuboid> stacked_placements(const IlpModel& model);

/// Checks a claimed assignment against every model constraint. Returns an
/// empty list when feasible, else human-readable violations.
std::vector<std::string> verify_placements(const IlpModel& model,
                                           std::span<const PlacedCuboid> placements);

/// Writes the model in LP interchange format. Variable names are stable:
/// x_i/y_i/z_i positions, r_i rotations, a_i_j/b_i_j/c_i_j separations, v.
std::string export_lp(const IlpModel& model);

/// Reads a "name value" per line solution listing (as produced by an
/// external solver), extracts the placements and validates them against
/// the model. Throws with a descriptive message on missing variables,
/// non-integral values (tolerance 1e-6) or constraint violations.
std::vector<PlacedCuboid> import_solution(const IlpModel& model, std::string_view text);

/// Full scheduler entry point used by the simulator: builds the model from
/// the ledger snapshot (segments and barriers above sp) and solves it with
/// the built-in search or the configured external solver. Falls back to the
/// naive stack on any external-solver failure so scheduling always answers.
IlpResult ilp_schedule_batch(const ScheduleState& state, std::span<const JobRequest> batch,
                             Step sp, const ProcessorConfig& proc, const IlpOptions& opts);

class IlpScheduler final : public Scheduler {
public:
    IlpScheduler(ProcessorConfig proc, IlpOptions opts)
        : proc_(proc), opts_(std::move(opts)) {}

    std::vector<PlacedCuboid> schedule_batch(const ScheduleState& state,
                                             std::span<const JobRequest> batch,
                                             Step sp) override {
        IlpResult result = ilp_schedule_batch(state, batch, sp, proc_, opts_);
        for (std::size_t k = 0; k < result.placements.size(); ++k) {
            result.placements[k].id = batch[k].id;
        }
        return std::move(result.placements);
    }
    std::string name() const override { return "ilp"; }

private:
    ProcessorConfig proc_;
    IlpOptions opts_;
};

} // namespace qmp
