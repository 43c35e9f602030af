#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "towsched/instance.hpp"
#include "towsched/pareto.hpp"
#include "towsched/schedule.hpp"

namespace towsched {

// --- resource contribution (degree-of-sharing scores) -------------------------

struct ResourceContribution {
    double rho1 = 0.0;     // serviceable-set ratio, normalized by the max
    double rho2 = 0.0;     // shared-fleet ratio, normalized by the max
    double rho3 = 0.0;     // population std dev of the operator's priorities
    double rho_raw = 0.0;  // rho1 + rho2 + rho3
    double rho = 0.0;      // min-max normalized across operators
};

// Scores every operator at once; the two ratio terms are normalized by the
// maximum across operators and the composite is min-max rescaled. When all
// composites coincide the normalization degenerates and every operator gets
// rho = 1 (equal contributors pool fully).
inline std::vector<ResourceContribution> resource_contributions(const Instance& inst) {
    int R = inst.num_operators();
    std::vector<ResourceContribution> out(R);
    std::vector<double> ratio1(R, 0.0), ratio2(R, 0.0);
    for (int r = 0; r < R; ++r) {
        const Operator& op = inst.operators[r];
        std::vector<char> shared_set = sharing_set(op, inst);
        int covered = 0;
        for (char c : shared_set) covered += c;
        int own = static_cast<int>(inst.own_flights[r].size());
        ratio1[r] = own > 0 ? static_cast<double>(covered) / own : 0.0;
        ratio2[r] = op.fleet_size > 0 ? static_cast<double>(op.shared_count) / op.fleet_size : 0.0;

        double mean = 0.0;
        for (int f : inst.own_flights[r]) mean += inst.priority_of(f, r);
        if (own > 0) mean /= own;
        double var = 0.0;
        for (int f : inst.own_flights[r]) {
            double d = inst.priority_of(f, r) - mean;
            var += d * d;
        }
        out[r].rho3 = own > 0 ? std::sqrt(var / own) : 0.0;
    }
    double max1 = *std::max_element(ratio1.begin(), ratio1.end());
    double max2 = *std::max_element(ratio2.begin(), ratio2.end());
    for (int r = 0; r < R; ++r) {
        out[r].rho1 = max1 > kEps ? ratio1[r] / max1 : 0.0;
        out[r].rho2 = max2 > kEps ? ratio2[r] / max2 : 0.0;
        out[r].rho_raw = out[r].rho1 + out[r].rho2 + out[r].rho3;
    }
    double lo = kInfinity, hi = -kInfinity;
    for (const auto& c : out) {
        lo = std::min(lo, c.rho_raw);
        hi = std::max(hi, c.rho_raw);
    }
    for (auto& c : out) c.rho = hi - lo > kEps ? (c.rho_raw - lo) / (hi - lo) : 1.0;
    return out;
}

// --- coalition restriction ----------------------------------------------------

// Variant of the instance where only the masked operators cooperate: sharing
// between a member and a non-member is cut in both directions, non-members
// keep no shared fleet. Operators outside the mask effectively run separated.
inline Instance restrict_to_coalition(const Instance& inst, const std::vector<char>& members) {
    Instance out = inst;
    out.coalition = members;
    for (int r = 0; r < out.num_operators(); ++r) {
        if (members[r]) continue;
        out.operators[r].shared_count = 0;
        out.operators[r].service_radius = 0.0;
    }
    // drop priority marks that cross the coalition boundary
    for (int r = 0; r < out.num_operators(); ++r) {
        auto& prio = out.operators[r].priority;
        std::vector<std::pair<int, int>> kept;
        for (const auto& [node, p] : prio) {
            int owner = inst.flights[inst.flight_index(node)].owner;
            if (owner == r || (members[r] && members[owner])) kept.emplace_back(node, p);
        }
        prio = std::move(kept);
    }
    out.finalize();
    return out;
}

// --- cost bookkeeping -----------------------------------------------------------

// Per-operator pricing inputs read off one solution: travel of the shared
// fleets, travel of the non-shared fleets, and the delay summed over the
// operator's own flights.
struct OperatorCostTerms {
    std::vector<double> shared_travel;
    std::vector<double> nonshared_travel;
    std::vector<double> own_delay;
};

inline OperatorCostTerms cost_terms(const Solution& sol, const Instance& inst) {
    OperatorCostTerms t;
    t.shared_travel.assign(inst.num_operators(), 0.0);
    t.nonshared_travel.assign(inst.num_operators(), 0.0);
    t.own_delay.assign(inst.num_operators(), 0.0);
    for (int v = 0; v < inst.num_vehicles(); ++v) {
        const VirtualFleet& fleet = inst.fleet_of_vehicle(v);
        if (fleet.kind == FleetKind::Shared)
            t.shared_travel[fleet.owner] += sol.route_distance[v];
        else
            t.nonshared_travel[fleet.owner] += sol.route_distance[v];
    }
    for (int r = 0; r < inst.num_operators(); ++r)
        for (int f : inst.own_flights[r]) t.own_delay[r] += sol.flight_delays[f];
    return t;
}

// Coalition-attributable cost of a member set: shared-fleet travel plus the
// contribution-weighted share of each member's own delay cost.
inline double coalition_cost_value(const OperatorCostTerms& terms, const Instance& inst,
                                   const std::vector<char>& members, const std::vector<double>& rho) {
    double total = 0.0;
    for (int r = 0; r < inst.num_operators(); ++r) {
        if (!members[r]) continue;
        total += inst.vehicle_params.unit_energy_cost * terms.shared_travel[r] +
                 rho[r] * inst.operators[r].unit_delay_cost * terms.own_delay[r];
    }
    return total;
}

// Full separated-mode cost of one operator: whole-fleet travel plus its
// entire delay cost. Used as the operator's baseline when computing savings.
inline double separated_cost(const OperatorCostTerms& terms, const Instance& inst, int r) {
    return inst.vehicle_params.unit_energy_cost *
               (terms.shared_travel[r] + terms.nonshared_travel[r]) +
           inst.operators[r].unit_delay_cost * terms.own_delay[r];
}

// Final cost borne by an operator under the coalition: its Shapley share plus
// non-shared travel plus the delay cost left outside the pot.
inline double operator_total_cost(const OperatorCostTerms& grand, const Instance& inst, int r,
                                  double phi_r, double rho_r) {
    return phi_r + inst.vehicle_params.unit_energy_cost * grand.nonshared_travel[r] +
           (1.0 - rho_r) * inst.operators[r].unit_delay_cost * grand.own_delay[r];
}

// --- Shapley value ---------------------------------------------------------------

// cost[mask] over all 2^n member subsets; cost[0] must be 0.
struct CharacteristicFunction {
    int players = 0;
    std::vector<double> cost;
};

inline std::vector<double> shapley(const CharacteristicFunction& cf) {
    int n = cf.players;
    std::vector<double> fact(n + 1, 1.0);
    for (int i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
    std::vector<double> phi(n, 0.0);
    for (int r = 0; r < n; ++r) {
        for (int mask = 0; mask < (1 << n); ++mask) {
            if (mask & (1 << r)) continue;
            int s = __builtin_popcount(static_cast<unsigned>(mask));
            double weight = fact[s] * fact[n - s - 1] / fact[n];
            phi[r] += weight * (cf.cost[mask | (1 << r)] - cf.cost[mask]);
        }
    }
    return phi;
}

// --- shared utilities --------------------------------------------------------------

// Relative savings of the cooperated Pareto set over the separated one, on
// objective index 1 or 2 (set means). Undefined when the separated mean is 0.
inline std::optional<double> shared_utility(const ParetoSet& os, const ParetoSet& oc, int objective) {
    double mos = objective == 1 ? os.mean_f1() : os.mean_f2();
    double moc = objective == 1 ? oc.mean_f1() : oc.mean_f2();
    if (std::abs(mos) <= kEps) return std::nullopt;
    return (mos - moc) / mos;
}

inline double individual_utility(double os_cost, double oc_cost) { return os_cost - oc_cost; }

// --- full allocation pipeline ---------------------------------------------------------

struct AllocationRow {
    int point = 0;
    double bound = kInfinity;
    int op = 0;
    double rho1 = 0.0, rho2 = 0.0, rho3 = 0.0, rho = 0.0;
    double phi = 0.0;
    double total_cost = 0.0;
    double utility = 0.0;
    std::string method;
};

struct AllocationReport {
    std::vector<AllocationRow> rows;
    int negative_improved = 0;
    int negative_traditional = 0;
};

inline Solution solve_restricted(const Instance& inst, const SearchConfig& cfg, double bound,
                                 SolverKind solver) {
    if (solver == SolverKind::Exact) return solve_exact(inst, bound).solution;
    SearchConfig c = cfg;
    c.eval.t_delay = bound;
    return run(inst, c).best;
}

// Improved and traditional Shapley allocation over every cooperated Pareto
// point. Subset schedules are solved once per point (same seed and bound as
// the grand solve) and priced under both weightings; the traditional method
// pools full delay costs (rho fixed at 1).
inline AllocationReport allocate(const Instance& oc_inst, const SearchConfig& cfg,
                                 SolverKind solver, bool improved = true, bool traditional = true) {
    if (oc_inst.mode != Mode::Cooperated)
        throw ScenarioError("allocation requires a cooperated-mode scenario");
    Instance os_inst = oc_inst;
    os_inst.mode = Mode::Separated;
    os_inst.finalize();

    ParetoSet os_set = default_sweep(os_inst, cfg, solver);
    ParetoSet oc_set = default_sweep(oc_inst, cfg, solver);
    if (os_set.points.empty() || oc_set.points.empty())
        throw InfeasibleError("allocation: empty Pareto set");

    auto contrib = resource_contributions(oc_inst);
    int R = oc_inst.num_operators();
    std::vector<double> rho_improved(R), rho_ones(R, 1.0);
    for (int r = 0; r < R; ++r) rho_improved[r] = contrib[r].rho;

    AllocationReport report;
    for (std::size_t k = 0; k < oc_set.points.size(); ++k) {
        const ParetoPoint& point = oc_set.points[k];
        OperatorCostTerms grand = cost_terms(point.solution, oc_inst);

        // pricing inputs for every subset; the grand coalition reuses the point
        std::vector<OperatorCostTerms> terms(1 << R);
        std::vector<std::vector<char>> masks(1 << R);
        for (int mask = 1; mask < (1 << R); ++mask) {
            std::vector<char> members(R, 0);
            for (int r = 0; r < R; ++r) members[r] = (mask >> r) & 1;
            masks[mask] = members;
            if (mask == (1 << R) - 1) {
                terms[mask] = grand;
            } else {
                Instance sub = restrict_to_coalition(oc_inst, members);
                Solution sol = solve_restricted(sub, cfg, point.bound, solver);
                terms[mask] = cost_terms(sol, sub);
            }
        }

        const ParetoPoint& os_point = os_set.points[std::min(k, os_set.points.size() - 1)];
        OperatorCostTerms os_terms = cost_terms(os_point.solution, os_inst);

        struct Method {
            const char* name;
            const std::vector<double>* rho;
            bool enabled;
        };
        Method methods[2] = {{"improved", &rho_improved, improved},
                             {"traditional", &rho_ones, traditional}};
        for (const Method& m : methods) {
            if (!m.enabled) continue;
            CharacteristicFunction cf;
            cf.players = R;
            cf.cost.assign(1 << R, 0.0);
            for (int mask = 1; mask < (1 << R); ++mask)
                cf.cost[mask] = coalition_cost_value(terms[mask], oc_inst, masks[mask], *m.rho);
            std::vector<double> phi = shapley(cf);
            for (int r = 0; r < R; ++r) {
                AllocationRow row;
                row.point = static_cast<int>(k);
                row.bound = point.bound;
                row.op = r;
                row.rho1 = contrib[r].rho1;
                row.rho2 = contrib[r].rho2;
                row.rho3 = contrib[r].rho3;
                row.rho = (*m.rho)[r];
                row.phi = phi[r];
                row.total_cost = operator_total_cost(grand, oc_inst, r, phi[r], (*m.rho)[r]);
                row.utility = individual_utility(separated_cost(os_terms, os_inst, r), row.total_cost);
                row.method = m.name;
                if (row.utility < -kEps) {
                    if (m.rho == &rho_improved)
                        ++report.negative_improved;
                    else
                        ++report.negative_traditional;
                }
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

}  // namespace towsched
