#include "qmp/ilp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace qmp {

std::string to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::TimedOut: return "timed-out";
    }
    return "?";
}

int IlpModel::var_index(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

std::size_t IlpModel::binary_count() const {
    std::size_t count = 0;
    for (const Var& v : vars_) count += v.binary ? 1 : 0;
    return count;
}

namespace {

bool fits_chip(Coord w, Coord h, Coord W, Coord H) { return w <= W && h <= H; }

std::string idx_name(const char* prefix, int i) {
    return std::string(prefix) + "_" + std::to_string(i);
}

std::string pair_name(const char* prefix, int i, int j) {
    return std::string(prefix) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

} // namespace

IlpModel build_model(std::span<const Cuboid> batch, std::span<const PlacedCuboid> fixed,
                     std::span<const DefragBarrier> barriers, Step sp,
                     const ProcessorConfig& proc, const IlpOptions& opts) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    if (sp < 0) throw std::invalid_argument("negative schedule point");

    IlpModel m;
    m.W_ = proc.width;
    m.H_ = proc.height;
    m.sp_ = sp;

    for (const Cuboid& c : batch) {
        const bool plain = fits_chip(c.w, c.h, m.W_, m.H_);
        const bool turned = fits_chip(c.h, c.w, m.W_, m.H_);
        if (!plain && !(opts.allow_rotation && turned)) {
            throw std::invalid_argument("job cannot fit");
        }
        const bool rotatable = opts.allow_rotation && c.w != c.h && plain && turned;
        // A job that only fits rotated is stored pre-rotated.
        const Cuboid stored = plain ? c : oriented(c, Rotation::R90);
        m.free_.push_back({stored.w, stored.h, stored.l, rotatable});
    }
    for (const PlacedCuboid& f : fixed) {
        m.fixed_.push_back({f.x, f.y, f.z, f.w, f.h, f.l});
    }
    for (const DefragBarrier& barrier : barriers) {
        for (const RectXY& region : barrier.regions) {
            m.fixed_.push_back(
                {region.x1, region.y1, barrier.t, region.x2 - region.x1,
                 region.y2 - region.y1, 0});
        }
    }

    Step sum_l = 0;
    for (const IlpModel::FreeJob& job : m.free_) sum_l += job.l;
    Step max_fixed_top = 0;
    for (const IlpModel::FixedBox& f : m.fixed_) {
        max_fixed_top = std::max(max_fixed_top, f.z + f.l);
    }
    m.big_l_ = sum_l + max_fixed_top + sp;

    const int n = static_cast<int>(m.free_.size());
    const int total = n + static_cast<int>(m.fixed_.size());

    // Variables: positions, rotations, pair binaries, objective.
    for (int i = 0; i < n; ++i) {
        m.vars_.push_back({idx_name("x", i), false, 0});
        m.vars_.push_back({idx_name("y", i), false, 0});
        m.vars_.push_back({idx_name("z", i), false, sp});
    }
    m.rotation_index_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!m.free_[i].rotatable) continue;
        m.rotation_index_[i] = static_cast<int>(m.vars_.size());
        m.vars_.push_back({idx_name("r", i), true, 0});
    }
    for (int gi = 0; gi < total; ++gi) {
        for (int gj = gi + 1; gj < total; ++gj) {
            if (gi >= n && gj >= n) continue; // two constants never need variables
            IlpModel::PairVars p;
            p.gi = gi;
            p.gj = gj;
            auto add = [&](const char* prefix, int a, int b) {
                m.vars_.push_back({pair_name(prefix, a, b), true, 0});
                return static_cast<int>(m.vars_.size()) - 1;
            };
            p.a_ij = add("a", gi, gj);
            p.a_ji = add("a", gj, gi);
            p.b_ij = add("b", gi, gj);
            p.b_ji = add("b", gj, gi);
            p.c_ij = add("c", gi, gj);
            p.c_ji = add("c", gj, gi);
            m.pairs_.push_back(p);
        }
    }
    m.v_index_ = static_cast<int>(m.vars_.size());
    m.vars_.push_back({"v", false, 0});

    // One separation row per pair, axis and direction: the leading box's
    // extent must end before the other box starts whenever the binary is 1;
    // with the binary at 0 the big-M makes the row follow from the bounds.
    struct Axis {
        const char* row_prefix;
        Step big;
    };
    const Axis axes[3] = {{"sepx", m.W_}, {"sepy", m.H_}, {"sepz", m.big_l_}};

    auto axis_size = [&](int g, int axis) -> Step {
        if (g < n) {
            const IlpModel::FreeJob& job = m.free_[g];
            return axis == 0 ? job.w : axis == 1 ? job.h : job.l;
        }
        const IlpModel::FixedBox& f = m.fixed_[g - n];
        return axis == 0 ? f.w : axis == 1 ? f.h : f.l;
    };
    auto axis_pos_var = [&](int g, int axis) -> int {
        return axis == 0 ? m.x_index(g) : axis == 1 ? m.y_index(g) : m.z_index(g);
    };
    auto axis_const = [&](int g, int axis) -> Step {
        const IlpModel::FixedBox& f = m.fixed_[g - n];
        return axis == 0 ? f.x : axis == 1 ? f.y : f.z;
    };
    // Rotation swaps a free job's w and h; the delta joins the row when the
    // leading box is rotatable and the axis is in the chip plane.
    auto rotation_delta = [&](int g, int axis) -> Step {
        if (g >= n || axis == 2 || m.rotation_index_[g] < 0) return 0;
        const IlpModel::FreeJob& job = m.free_[g];
        return axis == 0 ? job.h - job.w : job.w - job.h;
    };

    for (const IlpModel::PairVars& p : m.pairs_) {
        IlpModel::Row disj;
        disj.name = pair_name("disj", p.gi, p.gj);
        disj.sense = 'G';
        disj.rhs = 1.0;
        for (int var : {p.a_ij, p.a_ji, p.b_ij, p.b_ji, p.c_ij, p.c_ji}) {
            disj.terms.push_back({var, 1.0});
        }
        m.rows_.push_back(std::move(disj));

        const int binaries[3][2] = {
            {p.a_ij, p.a_ji}, {p.b_ij, p.b_ji}, {p.c_ij, p.c_ji}};
        for (int axis = 0; axis < 3; ++axis) {
            for (int dir = 0; dir < 2; ++dir) {
                const int lead = dir == 0 ? p.gi : p.gj;
                const int follow = dir == 0 ? p.gj : p.gi;
                IlpModel::Row row;
                row.name = pair_name(axes[axis].row_prefix, lead, follow);
                row.sense = 'L';
                double rhs = static_cast<double>(axes[axis].big) -
                             static_cast<double>(axis_size(lead, axis));
                if (lead < n) {
                    row.terms.push_back({axis_pos_var(lead, axis), 1.0});
                } else {
                    rhs -= static_cast<double>(axis_const(lead, axis));
                }
                if (follow < n) {
                    row.terms.push_back({axis_pos_var(follow, axis), -1.0});
                } else {
                    rhs += static_cast<double>(axis_const(follow, axis));
                }
                row.terms.push_back({binaries[axis][dir],
                                     static_cast<double>(axes[axis].big)});
                if (const Step delta = rotation_delta(lead, axis); delta != 0) {
                    row.terms.push_back({m.rotation_index_[lead],
                                         static_cast<double>(delta)});
                }
                row.rhs = rhs;
                m.rows_.push_back(std::move(row));
            }
        }
    }

    for (int i = 0; i < n; ++i) {
        const IlpModel::FreeJob& job = m.free_[i];
        {
            IlpModel::Row row{idx_name("bndx", i), {{m.x_index(i), 1.0}}, 'L',
                              static_cast<double>(m.W_ - job.w)};
            if (const Step delta = rotation_delta(i, 0); delta != 0) {
                row.terms.push_back({m.rotation_index_[i], static_cast<double>(delta)});
            }
            m.rows_.push_back(std::move(row));
        }
        {
            IlpModel::Row row{idx_name("bndy", i), {{m.y_index(i), 1.0}}, 'L',
                              static_cast<double>(m.H_ - job.h)};
            if (const Step delta = rotation_delta(i, 1); delta != 0) {
                row.terms.push_back({m.rotation_index_[i], static_cast<double>(delta)});
            }
            m.rows_.push_back(std::move(row));
        }
        m.rows_.push_back({idx_name("bndz", i),
                           {{m.z_index(i), 1.0}},
                           'L',
                           static_cast<double>(m.big_l_ - job.l)});
        m.rows_.push_back({idx_name("mk", i),
                           {{m.z_index(i), 1.0}, {m.v_index_, -1.0}},
                           'L',
                           static_cast<double>(-job.l)});
    }

    return m;
}

std::vector<PlacedCuboid> stacked_placements(const IlpModel& model) {
    Step z = model.schedule_point();
    for (const IlpModel::FixedBox& f : model.fixed_boxes()) {
        z = std::max(z, f.z + f.l);
    }
    std::vector<PlacedCuboid> out;
    out.reserve(model.free_jobs().size());
    for (std::size_t i = 0; i < model.free_jobs().size(); ++i) {
        const IlpModel::FreeJob& job = model.free_jobs()[i];
        Coord w = job.w, h = job.h;
        if (!fits_chip(w, h, model.chip_w(), model.chip_h())) std::swap(w, h);
        out.push_back({static_cast<JobId>(i), 0, 0, z, w, h, job.l});
        z += job.l;
    }
    return out;
}

std::vector<std::string> verify_placements(const IlpModel& model,
                                           std::span<const PlacedCuboid> placements) {
    std::vector<std::string> errors;
    const int n = static_cast<int>(model.free_jobs().size());
    if (static_cast<int>(placements.size()) != n) {
        errors.push_back("expected " + std::to_string(n) + " placements");
        return errors;
    }
    for (int i = 0; i < n; ++i) {
        const PlacedCuboid& p = placements[i];
        const IlpModel::FreeJob& job = model.free_jobs()[i];
        const bool plain = p.w == job.w && p.h == job.h;
        const bool turned = p.w == job.h && p.h == job.w;
        if (p.l != job.l || !(plain || (turned && job.rotatable) ||
                              (turned && job.w == job.h))) {
            errors.push_back("job " + std::to_string(i) + " has the wrong shape");
        }
        if (p.x < 0 || p.y < 0 || p.x2() > model.chip_w() || p.y2() > model.chip_h()) {
            errors.push_back("job " + std::to_string(i) + " leaves the chip");
        }
        if (p.z < model.schedule_point()) {
            errors.push_back("job " + std::to_string(i) + " starts before the schedule point");
        }
        if (p.z2() > model.big_l()) {
            errors.push_back("job " + std::to_string(i) + " exceeds the horizon");
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (overlaps(placements[i], placements[j])) {
                errors.push_back("jobs " + std::to_string(i) + " and " +
                                 std::to_string(j) + " overlap");
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        const PlacedCuboid& p = placements[i];
        for (const IlpModel::FixedBox& f : model.fixed_boxes()) {
            if (f.l > 0) {
                const PlacedCuboid box{0, f.x, f.y, f.z, f.w, f.h, f.l};
                if (overlaps(p, box)) {
                    errors.push_back("job " + std::to_string(i) +
                                     " overlaps a reserved box");
                }
            } else if (p.z < f.z && f.z < p.z2()) {
                const RectXY foot{p.x, p.y, p.x2(), p.y2()};
                const RectXY region{f.x, f.y, f.x + f.w, f.y + f.h};
                if (foot.intersects(region)) {
                    errors.push_back("job " + std::to_string(i) +
                                     " spans a relocation plane");
                }
            }
        }
    }
    return errors;
}

namespace {

// ---------------------------------------------------------------------
// Branch and bound
// ---------------------------------------------------------------------

struct Domains {
    // Per free job, per axis: inclusive position interval.
    std::vector<Step> lo, hi; // laid out as job*3 + axis
};

class BranchAndBound {
public:
    BranchAndBound(const IlpModel& model, std::chrono::steady_clock::time_point deadline)
        : model_(model), deadline_(deadline), n_(static_cast<int>(model.free_jobs().size())) {
        for (int i = 0; i < n_; ++i) {
            if (model_.free_jobs()[i].rotatable) rotation_decisions_.push_back(i);
        }
        pair_order_.resize(model_.pairs().size());
        for (std::size_t p = 0; p < pair_order_.size(); ++p) pair_order_[p] = p;
        std::sort(pair_order_.begin(), pair_order_.end(), [&](std::size_t a, std::size_t b) {
            return pair_volume(a) < pair_volume(b);
        });
        orient_.assign(n_, -1);
        for (int i = 0; i < n_; ++i) {
            if (!model_.free_jobs()[i].rotatable) orient_[i] = 0;
        }
        choice_.assign(model_.pairs().size(), -1);

        incumbent_ = stacked_placements(model_);
        best_v_ = 0;
        for (const PlacedCuboid& p : incumbent_) best_v_ = std::max(best_v_, p.z2());
        improved_ = false;
    }

    IlpResult run() {
        search(0);
        IlpResult result;
        result.placements = incumbent_;
        result.makespan = best_v_;
        result.nodes = nodes_;
        result.status = timed_out_ ? (improved_ ? SolveStatus::Feasible
                                                : SolveStatus::TimedOut)
                                   : SolveStatus::Optimal;
        return result;
    }

private:
    Step pair_volume(std::size_t p) const {
        const IlpModel::PairVars& pv = model_.pairs()[p];
        return box_volume(pv.gi) + box_volume(pv.gj);
    }
    Step box_volume(int g) const {
        if (model_.is_free(g)) {
            const IlpModel::FreeJob& job = model_.free_jobs()[g];
            return job.w * job.h * job.l;
        }
        const IlpModel::FixedBox& f = model_.fixed_boxes()[g - n_];
        return std::max<Step>(f.w * f.h * f.l, 1);
    }

    // Minimal extent of box g along an axis, given the orientation state.
    Step size_of(int g, int axis) const {
        if (!model_.is_free(g)) {
            const IlpModel::FixedBox& f = model_.fixed_boxes()[g - n_];
            return axis == 0 ? f.w : axis == 1 ? f.h : f.l;
        }
        const IlpModel::FreeJob& job = model_.free_jobs()[g];
        if (axis == 2) return job.l;
        if (orient_[g] == 0) return axis == 0 ? job.w : job.h;
        if (orient_[g] == 1) return axis == 0 ? job.h : job.w;
        return std::min(job.w, job.h); // unknown: sound under-approximation
    }

    Step fixed_pos(int g, int axis) const {
        const IlpModel::FixedBox& f = model_.fixed_boxes()[g - n_];
        return axis == 0 ? f.x : axis == 1 ? f.y : f.z;
    }

    bool propagate(Domains& d) const {
        d.lo.assign(static_cast<std::size_t>(n_) * 3, 0);
        d.hi.assign(static_cast<std::size_t>(n_) * 3, 0);
        for (int i = 0; i < n_; ++i) {
            d.lo[i * 3 + 0] = 0;
            d.hi[i * 3 + 0] = model_.chip_w() - size_of(i, 0);
            d.lo[i * 3 + 1] = 0;
            d.hi[i * 3 + 1] = model_.chip_h() - size_of(i, 1);
            d.lo[i * 3 + 2] = model_.schedule_point();
            // Only strictly better solutions are of interest.
            d.hi[i * 3 + 2] = std::min(model_.big_l(), best_v_ - 1) -
                              model_.free_jobs()[i].l;
            if (d.hi[i * 3 + 0] < 0 || d.hi[i * 3 + 1] < 0 ||
                d.hi[i * 3 + 2] < d.lo[i * 3 + 2]) {
                return false;
            }
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t p = 0; p < choice_.size(); ++p) {
                if (choice_[p] < 0) continue;
                const IlpModel::PairVars& pv = model_.pairs()[p];
                const int axis = choice_[p] / 2;
                const bool forward = choice_[p] % 2 == 0;
                const int lead = forward ? pv.gi : pv.gj;
                const int follow = forward ? pv.gj : pv.gi;
                const Step sep = size_of(lead, axis);
                if (model_.is_free(lead) && model_.is_free(follow)) {
                    Step& lo_f = d.lo[follow * 3 + axis];
                    Step& hi_l = d.hi[lead * 3 + axis];
                    const Step new_lo = d.lo[lead * 3 + axis] + sep;
                    const Step new_hi = d.hi[follow * 3 + axis] - sep;
                    if (new_lo > lo_f) { lo_f = new_lo; changed = true; }
                    if (new_hi < hi_l) { hi_l = new_hi; changed = true; }
                    if (lo_f > d.hi[follow * 3 + axis] || d.lo[lead * 3 + axis] > hi_l) {
                        return false;
                    }
                } else if (model_.is_free(follow)) {
                    Step& lo_f = d.lo[follow * 3 + axis];
                    const Step new_lo = fixed_pos(lead, axis) + sep;
                    if (new_lo > lo_f) { lo_f = new_lo; changed = true; }
                    if (lo_f > d.hi[follow * 3 + axis]) return false;
                } else {
                    Step& hi_l = d.hi[lead * 3 + axis];
                    const Step new_hi = fixed_pos(follow, axis) - sep;
                    if (new_hi < hi_l) { hi_l = new_hi; changed = true; }
                    if (d.lo[lead * 3 + axis] > hi_l) return false;
                }
            }
        }
        return true;
    }

    Step lower_bound(const Domains& d) const {
        Step lb = model_.schedule_point();
        Step volume = 0;
        for (int i = 0; i < n_; ++i) {
            lb = std::max(lb, d.lo[i * 3 + 2] + model_.free_jobs()[i].l);
            volume += model_.free_jobs()[i].w * model_.free_jobs()[i].h *
                      model_.free_jobs()[i].l;
        }
        const Step area = model_.chip_w() * model_.chip_h();
        lb = std::max(lb, model_.schedule_point() + ceil_div(volume, area));
        return lb;
    }

    void record_leaf(const Domains& d) {
        std::vector<PlacedCuboid> placements;
        placements.reserve(n_);
        Step v = model_.schedule_point();
        for (int i = 0; i < n_; ++i) {
            const IlpModel::FreeJob& job = model_.free_jobs()[i];
            const Coord w = orient_[i] == 1 ? job.h : job.w;
            const Coord h = orient_[i] == 1 ? job.w : job.h;
            placements.push_back({static_cast<JobId>(i), d.lo[i * 3 + 0],
                                  d.lo[i * 3 + 1], d.lo[i * 3 + 2], w, h, job.l});
            v = std::max(v, d.lo[i * 3 + 2] + job.l);
        }
        if (v >= best_v_) return;
        if (!verify_placements(model_, placements).empty()) return;
        incumbent_ = std::move(placements);
        best_v_ = v;
        improved_ = true;
    }

    void search(std::size_t depth) {
        if (timed_out_) return;
        if ((++nodes_ & 0x3F) == 0 &&
            std::chrono::steady_clock::now() >= deadline_) {
            timed_out_ = true;
            return;
        }
        Domains d;
        if (!propagate(d)) return;
        if (lower_bound(d) >= best_v_) return;

        if (depth < rotation_decisions_.size()) {
            const int job = rotation_decisions_[depth];
            for (int o = 0; o < 2 && !timed_out_; ++o) {
                orient_[job] = o;
                search(depth + 1);
            }
            orient_[job] = -1;
            return;
        }
        const std::size_t pair_depth = depth - rotation_decisions_.size();
        if (pair_depth == pair_order_.size()) {
            record_leaf(d);
            return;
        }
        const std::size_t p = pair_order_[pair_depth];
        // Spatial separations first, time separation last.
        for (int value = 0; value < 6 && !timed_out_; ++value) {
            choice_[p] = value;
            search(depth + 1);
        }
        choice_[p] = -1;
    }

    const IlpModel& model_;
    std::chrono::steady_clock::time_point deadline_;
    int n_;
    std::vector<int> rotation_decisions_;
    std::vector<std::size_t> pair_order_;
    std::vector<int> orient_;       // -1 unknown, 0 as-is, 1 quarter turn
    std::vector<signed char> choice_; // -1 or 0..5 = ax ij, ax ji, ay.., az..
    std::vector<PlacedCuboid> incumbent_;
    Step best_v_ = 0;
    bool improved_ = false;
    bool timed_out_ = false;
    std::uint64_t nodes_ = 0;
};

} // namespace

IlpResult solve_exact(const IlpModel& model, std::chrono::milliseconds time_limit) {
    const auto deadline = std::chrono::steady_clock::now() + time_limit;
    BranchAndBound search(model, deadline);
    return search.run();
}

// ---------------------------------------------------------------------
// LP interchange
// ---------------------------------------------------------------------

namespace {

std::string format_coefficient(double value) {
    const long long as_int = static_cast<long long>(std::llround(value));
    if (std::abs(value - static_cast<double>(as_int)) < 1e-9) {
        return std::to_string(as_int);
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

void append_terms(std::string& out, const IlpModel& model,
                  const std::vector<std::pair<int, double>>& terms) {
    bool first = true;
    for (const auto& [var, coeff] : terms) {
        const double mag = std::abs(coeff);
        if (first) {
            if (coeff < 0) out += "- ";
            first = false;
        } else {
            out += coeff < 0 ? " - " : " + ";
        }
        if (std::abs(mag - 1.0) > 1e-12) {
            out += format_coefficient(mag);
            out += ' ';
        }
        out += model.vars()[var].name;
    }
}

} // namespace

std::string export_lp(const IlpModel& model) {
    std::string out;
    out += "\\ online cuboid schedule: " + std::to_string(model.free_jobs().size()) +
           " free, " + std::to_string(model.fixed_boxes().size()) + " fixed\n";
    out += "Minimize\n obj: " + model.vars()[model.objective_var()].name + "\n";
    out += "Subject To\n";
    for (const IlpModel::Row& row : model.rows()) {
        out += " " + row.name + ": ";
        append_terms(out, model, row.terms);
        out += row.sense == 'G' ? " >= " : " <= ";
        out += format_coefficient(row.rhs);
        out += "\n";
    }
    bool any_bound = false;
    for (const IlpModel::Var& var : model.vars()) {
        if (!var.binary && var.lower != 0) {
            if (!any_bound) {
                out += "Bounds\n";
                any_bound = true;
            }
            out += " " + var.name + " >= " + std::to_string(var.lower) + "\n";
        }
    }
    out += "Generals\n";
    for (const IlpModel::Var& var : model.vars()) {
        if (!var.binary) out += " " + var.name;
    }
    out += "\n";
    if (model.binary_count() > 0) {
        out += "Binaries\n";
        for (const IlpModel::Var& var : model.vars()) {
            if (var.binary) out += " " + var.name;
        }
        out += "\n";
    }
    out += "End\n";
    return out;
}

std::vector<PlacedCuboid> import_solution(const IlpModel& model, std::string_view text) {
    std::vector<double> values(model.vars().size(), 0.0);
    std::vector<bool> present(model.vars().size(), false);

    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string name;
        if (!(fields >> name)) continue;
        if (name[0] == '#' || name[0] == '\\') continue;
        double value = 0.0;
        if (!(fields >> value)) {
            throw std::invalid_argument("malformed solution line: " + line);
        }
        const int idx = model.var_index(name);
        if (idx < 0) continue; // solvers may emit extra variables
        values[idx] = value;
        present[idx] = true;
    }

    const int n = static_cast<int>(model.free_jobs().size());
    auto integral = [&](int idx) -> Step {
        const double value = values[idx];
        const double rounded = std::round(value);
        if (std::abs(value - rounded) > 1e-6) {
            throw std::invalid_argument("non-integral value for " +
                                        model.vars()[idx].name);
        }
        return static_cast<Step>(rounded);
    };

    std::vector<PlacedCuboid> placements;
    placements.reserve(n);
    for (int i = 0; i < n; ++i) {
        for (int idx : {model.x_index(i), model.y_index(i), model.z_index(i)}) {
            if (!present[idx]) {
                throw std::invalid_argument("missing variable " +
                                            model.vars()[idx].name);
            }
        }
        const IlpModel::FreeJob& job = model.free_jobs()[i];
        bool turned = false;
        if (const int r = model.rotation_index(i); r >= 0 && present[r]) {
            turned = integral(r) != 0;
        }
        const Coord w = turned ? job.h : job.w;
        const Coord h = turned ? job.w : job.h;
        placements.push_back({static_cast<JobId>(i), integral(model.x_index(i)),
                              integral(model.y_index(i)), integral(model.z_index(i)),
                              w, h, job.l});
    }

    const std::vector<std::string> errors = verify_placements(model, placements);
    if (!errors.empty()) {
        throw std::invalid_argument("infeasible solution: " + errors.front());
    }
    return placements;
}

// ---------------------------------------------------------------------
// Scheduler entry point
// ---------------------------------------------------------------------

namespace {

IlpResult solve_external(const IlpModel& model, const std::string& command_template) {
    namespace fs = std::filesystem;
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path();
    const std::string stem = "qmp_ilp_" + std::to_string(::getpid()) + "_" +
                             std::to_string(counter++);
    const fs::path lp_path = dir / (stem + ".lp");
    const fs::path sol_path = dir / (stem + ".sol");

    std::string command = command_template;
    auto replace_all = [&](const std::string& key, const std::string& value) {
        std::size_t at = 0;
        bool found = false;
        while ((at = command.find(key, at)) != std::string::npos) {
            command.replace(at, key.size(), value);
            at += value.size();
            found = true;
        }
        return found;
    };
    const bool has_lp = replace_all("{lp}", lp_path.string());
    replace_all("{sol}", sol_path.string());
    if (!has_lp) {
        throw std::invalid_argument("external solver template lacks {lp}");
    }

    {
        std::ofstream lp(lp_path);
        lp << export_lp(model);
    }
    const int rc = std::system(command.c_str());
    if (rc != 0) {
        throw std::runtime_error("external solver exited with status " +
                                 std::to_string(rc));
    }
    std::ifstream sol(sol_path);
    if (!sol) throw std::runtime_error("external solver wrote no solution file");
    std::stringstream buffer;
    buffer << sol.rdbuf();

    IlpResult result;
    result.placements = import_solution(model, buffer.str());
    for (const PlacedCuboid& p : result.placements) {
        result.makespan = std::max(result.makespan, p.z2());
    }
    result.status = SolveStatus::Feasible; // optimality is the solver's claim
    return result;
}

} // namespace

IlpResult ilp_schedule_batch(const ScheduleState& state, std::span<const JobRequest> batch,
                             Step sp, const ProcessorConfig& proc, const IlpOptions& opts) {
    std::vector<Cuboid> shapes;
    shapes.reserve(batch.size());
    for (const JobRequest& request : batch) shapes.push_back(job_shape(request));

    // Segments and planes entirely below sp can never interact with the
    // batch (every free job starts at or after sp).
    std::vector<PlacedCuboid> fixed;
    for (const ReservedJob& job : state.reserved) {
        for (const PlacedCuboid& s : job.segments) {
            if (s.z2() > sp) fixed.push_back(s);
        }
    }
    std::vector<DefragBarrier> barriers;
    for (const DefragBarrier& barrier : state.barriers) {
        if (barrier.t > sp) barriers.push_back(barrier);
    }

    const IlpModel model = build_model(shapes, fixed, barriers, sp, proc, opts);
    if (!opts.external_solver.empty()) {
        try {
            return solve_external(model, opts.external_solver);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "external solver failed (%s); stacking batch\n",
                         e.what());
            IlpResult fallback;
            fallback.placements = stacked_placements(model);
            for (const PlacedCuboid& p : fallback.placements) {
                fallback.makespan = std::max(fallback.makespan, p.z2());
            }
            fallback.status = SolveStatus::TimedOut;
            return fallback;
        }
    }
    return solve_exact(model, opts.time_limit);
}

} // namespace qmp
