#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "towsched/coadh.hpp"
#include "towsched/exact.hpp"
#include "towsched/instance.hpp"

namespace towsched {

enum class SolverKind { Coadh, Exact };

struct ParetoPoint {
    double bound = kInfinity;  // the delay cap this point was solved under
    Solution solution;
    double f1 = 0.0;
    double f2 = 0.0;
};

struct ParetoSet {
    Mode mode = Mode::Separated;
    std::vector<ParetoPoint> points;

    double mean_f1() const {
        double s = 0.0;
        for (const auto& p : points) s += p.f1;
        return points.empty() ? 0.0 : s / points.size();
    }
    double mean_f2() const {
        double s = 0.0;
        for (const auto& p : points) s += p.f2;
        return points.empty() ? 0.0 : s / points.size();
    }
};

// Keep only weakly non-dominated points (duplicates collapse to one copy),
// ordered by f2 ascending.
inline std::vector<ParetoPoint> dominance_filter(std::vector<ParetoPoint> points) {
    std::vector<ParetoPoint> kept;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            if (i == j) continue;
            bool weak = points[j].f1 <= points[i].f1 && points[j].f2 <= points[i].f2;
            bool strict = points[j].f1 < points[i].f1 || points[j].f2 < points[i].f2;
            if (weak && strict) dominated = true;
            // exact duplicate: keep the earliest
            if (weak && !strict && j < i) dominated = true;
        }
        if (!dominated) kept.push_back(points[i]);
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [](const ParetoPoint& a, const ParetoPoint& b) { return a.f2 < b.f2; });
    return kept;
}

namespace detail {

inline std::optional<ParetoPoint> solve_at_bound(const Instance& inst, const SearchConfig& cfg,
                                                 double bound, SolverKind solver) {
    ParetoPoint p;
    p.bound = bound;
    if (solver == SolverKind::Exact) {
        try {
            ExactResult r = solve_exact(inst, bound);
            p.solution = std::move(r.solution);
            p.f1 = r.optimal_f1;
            p.f2 = r.optimal_f2;
        } catch (const InfeasibleError&) {
            return std::nullopt;
        }
        return p;
    }
    SearchConfig level_cfg = cfg;
    level_cfg.eval.t_delay = bound;
    RunResult r = run(inst, level_cfg);
    // a point only counts if the delay cap is met with zero residual penalty
    if (r.best.total_delay > bound + kEps) return std::nullopt;
    auto [f1, f2] = objectives(r.best, inst.vehicle_params);
    p.solution = std::move(r.best);
    p.f1 = f1;
    p.f2 = f2;
    return p;
}

}  // namespace detail

// One single-objective solve per delay bound (min f1 subject to the cap),
// then a dominance filter. Infeasible bounds are skipped.
inline ParetoSet epsilon_sweep(const Instance& inst, const SearchConfig& cfg,
                               const std::vector<double>& bounds, SolverKind solver) {
    ParetoSet set;
    set.mode = inst.mode;
    std::vector<ParetoPoint> raw;
    for (double b : bounds) {
        auto p = detail::solve_at_bound(inst, cfg, b, solver);
        if (p) raw.push_back(std::move(*p));
    }
    set.points = dominance_filter(std::move(raw));
    return set;
}

// Default grid: four levels spaced geometrically from the unconstrained
// solution's delay down to max(1, floor(f2/8)). Degenerate delays collapse
// to fewer levels.
inline std::vector<double> default_bounds(const Instance& inst, const SearchConfig& cfg,
                                          SolverKind solver) {
    auto anchor = detail::solve_at_bound(inst, cfg, kInfinity, solver);
    if (!anchor) throw InfeasibleError("unconstrained solve failed; no Pareto anchor");
    double f2u = anchor->f2;
    if (f2u <= kEps) return {kInfinity};
    double lo = std::max(1.0, std::floor(f2u / 8.0));
    if (lo >= f2u - kEps) return {f2u};
    std::vector<double> bounds;
    for (int i = 0; i < 4; ++i) bounds.push_back(f2u * std::pow(lo / f2u, i / 3.0));
    return bounds;
}

inline ParetoSet default_sweep(const Instance& inst, const SearchConfig& cfg, SolverKind solver) {
    return epsilon_sweep(inst, cfg, default_bounds(inst, cfg, solver), solver);
}

}  // namespace towsched
