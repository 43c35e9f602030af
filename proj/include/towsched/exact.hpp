#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "towsched/instance.hpp"
#include "towsched/schedule.hpp"

namespace towsched {

struct ExactOptions {
    bool prune = true;               // branch-and-bound cuts; assumes the triangle inequality
    bool enumerate_chargers = false; // exhaustive charger placement instead of the greedy walk
};

struct ExactResult {
    double optimal_f1 = kInfinity;
    double optimal_f2 = kInfinity;
    Solution solution;
    long nodes_explored = 0;
    bool proven = false;
};

namespace detail {

// Flights-only distance and delay of one route: a lower bound on the final
// values, since charging visits only add detours and waiting.
inline std::pair<double, double> route_lower_bound(const std::vector<int>& seq, int vehicle,
                                                   const Instance& inst) {
    Trajectory t = propagate_timetable(make_trajectory(vehicle, seq, inst), inst, 0.0);
    double dist = 0.0, delay = 0.0;
    for (std::size_t i = 1; i < t.visits.size(); ++i)
        dist += inst.graph.distance.at(t.visits[i - 1].node, t.visits[i].node);
    for (const Visit& v : t.visits) {
        if (inst.graph.nodes[v.node].kind != NodeKind::Flight) continue;
        int f = inst.flight_index(inst.graph.nodes[v.node].id);
        delay += flight_delay(v.service_start, inst.flights[f].latest);
    }
    return {dist, delay};
}

// (distance, delay) of a finished route after charging insertion; nullopt
// when no charger placement keeps the battery above the floor.
inline std::optional<std::pair<double, double>> route_final(const std::vector<int>& seq,
                                                            int vehicle, const Instance& inst) {
    auto charged = insert_charging(make_trajectory(vehicle, seq, inst), inst);
    if (!charged) return std::nullopt;
    Trajectory t = propagate_timetable(std::move(*charged), inst, 0.0);
    double dist = 0.0, delay = 0.0;
    for (std::size_t i = 1; i < t.visits.size(); ++i)
        dist += inst.graph.distance.at(t.visits[i - 1].node, t.visits[i].node);
    for (const Visit& v : t.visits) {
        if (inst.graph.nodes[v.node].kind != NodeKind::Flight) continue;
        int f = inst.flight_index(inst.graph.nodes[v.node].id);
        delay += flight_delay(v.service_start, inst.flights[f].latest);
    }
    return std::make_pair(dist, delay);
}

// All battery-feasible charger placements of one route, as (distance, delay)
// candidates. At most one charger per gap, matching the model's one-stop legs.
inline void charger_placements(const std::vector<int>& seq, int vehicle, const Instance& inst,
                               std::vector<std::pair<double, double>>& out) {
    const VehicleParams& vp = inst.vehicle_params;
    const Graph& g = inst.graph;
    Trajectory bare = make_trajectory(vehicle, seq, inst);
    std::size_t stops = bare.visits.size();
    std::vector<int> chosen(stops, -1);  // charger node inserted before visit i, or -1

    auto emit = [&]() {
        Trajectory t;
        t.vehicle = bare.vehicle;
        t.fleet = bare.fleet;
        t.visits.push_back(bare.visits.front());
        t.visits.front().soc_on_arrival = vp.capacity;
        double soc = vp.capacity;
        int cur = t.visits.front().node;
        for (std::size_t i = 1; i < stops; ++i) {
            if (chosen[i] >= 0) {
                Visit c;
                c.node = chosen[i];
                c.soc_on_arrival = soc - g.energy.at(cur, c.node);
                if (c.soc_on_arrival < vp.min_soc() - kEps) return;
                t.visits.push_back(c);
                soc = vp.capacity;
                cur = c.node;
            }
            Visit v = bare.visits[i];
            v.soc_on_arrival = soc - g.energy.at(cur, v.node);
            if (v.soc_on_arrival < vp.min_soc() - kEps) return;
            t.visits.push_back(v);
            double duty = g.nodes[v.node].kind == NodeKind::Flight
                              ? inst.flights[inst.flight_index(g.nodes[v.node].id)].service_energy
                              : 0.0;
            soc = v.soc_on_arrival - duty;
            if (soc < vp.min_soc() - kEps) return;
            cur = v.node;
        }
        t = propagate_timetable(std::move(t), inst, 0.0);
        double dist = 0.0, delay = 0.0;
        for (std::size_t i = 1; i < t.visits.size(); ++i)
            dist += g.distance.at(t.visits[i - 1].node, t.visits[i].node);
        for (const Visit& v : t.visits) {
            if (g.nodes[v.node].kind != NodeKind::Flight) continue;
            int f = inst.flight_index(g.nodes[v.node].id);
            delay += flight_delay(v.service_start, inst.flights[f].latest);
        }
        out.emplace_back(dist, delay);
    };

    // depth-first over gaps x (no charger | each charger)
    auto rec = [&](auto&& self, std::size_t gap) -> void {
        if (gap == stops) {
            emit();
            return;
        }
        chosen[gap] = -1;
        self(self, gap + 1);
        for (int e : inst.chargers) {
            chosen[gap] = e;
            self(self, gap + 1);
        }
        chosen[gap] = -1;
    };
    rec(rec, 1);
}

struct ExactState {
    ExactState(const Instance& i, const ExactOptions& o, double b) : inst(i), opt(o), bound(b) {}
    const Instance& inst;
    const ExactOptions& opt;
    double bound;
    std::vector<int> order;  // flight indexes by node id
    std::vector<std::vector<int>> routes;
    std::vector<double> lb_dist;   // per-vehicle flights-only distance
    std::vector<double> lb_delay;  // per-vehicle flights-only delay
    std::vector<int> assignment;
    int violations = 0;
    double best_f1 = kInfinity;
    double best_f2 = kInfinity;
    std::vector<std::vector<int>> best_routes;
    long nodes = 0;
    bool found = false;

    double total_lb_dist() const {
        double s = 0.0;
        for (double d : lb_dist) s += d;
        return s;
    }
    double total_lb_delay() const {
        double s = 0.0;
        for (double d : lb_delay) s += d;
        return s;
    }
};

inline void exact_leaf(ExactState& st) {
    const Instance& inst = st.inst;
    double dist = 0.0, delay = 0.0;
    if (st.opt.enumerate_chargers) {
        // joint minimum over per-route placements subject to the delay bound
        std::vector<std::vector<std::pair<double, double>>> options(st.routes.size());
        for (std::size_t v = 0; v < st.routes.size(); ++v) {
            charger_placements(st.routes[v], static_cast<int>(v), inst, options[v]);
            if (options[v].empty()) return;
            std::sort(options[v].begin(), options[v].end());
        }
        double best = kInfinity, best_delay = kInfinity;
        auto rec = [&](auto&& self, std::size_t v, double d, double dl) -> void {
            if (d >= best - kEps) return;
            if (dl > st.bound + kEps) return;
            if (v == options.size()) {
                best = d;
                best_delay = dl;
                return;
            }
            for (const auto& [od, odl] : options[v]) self(self, v + 1, d + od, dl + odl);
        };
        rec(rec, 0, 0.0, 0.0);
        if (!std::isfinite(best)) return;
        dist = best;
        delay = best_delay;
    } else {
        for (std::size_t v = 0; v < st.routes.size(); ++v) {
            auto fin = route_final(st.routes[v], static_cast<int>(v), inst);
            if (!fin) return;
            dist += fin->first;
            delay += fin->second;
        }
        if (delay > st.bound + kEps) return;
    }
    double f1 = inst.vehicle_params.unit_energy_cost * dist;
    if (f1 < st.best_f1 - 1e-12) {
        st.best_f1 = f1;
        st.best_f2 = delay;
        st.best_routes = st.routes;
        st.found = true;
    }
}

inline int violation_delta_partial(const ExactState& st, int f, int r) {
    int delta = 0;
    const Instance& inst = st.inst;
    for (int j = 0; j < inst.num_flights(); ++j) {
        if (j == f || st.assignment[j] < 0 || !inst.overlap[f][j]) continue;
        for (const Operator& op : inst.operators) {
            int zf = r == op.id;
            int zj = st.assignment[j] == op.id;
            if (zf == zj) continue;
            int dp = inst.priority_of(f, op.id) - inst.priority_of(j, op.id);
            if ((zf - zj) * dp < 0) ++delta;
        }
    }
    return delta;
}

inline void exact_dfs(ExactState& st, std::size_t depth) {
    ++st.nodes;
    const Instance& inst = st.inst;
    if (depth == st.order.size()) {
        exact_leaf(st);
        return;
    }
    int f = st.order[depth];
    for (int v = 0; v < inst.num_vehicles(); ++v) {
        if (!inst.fleet_of_vehicle(v).serviceable[f]) continue;
        int owner = inst.fleet_of_vehicle(v).owner;
        int dv = violation_delta_partial(st, f, owner);
        if (dv > 0) continue;  // a violated pair can never heal
        auto& seq = st.routes[v];
        double old_dist = st.lb_dist[v], old_delay = st.lb_delay[v];
        for (std::size_t pos = 0; pos <= seq.size(); ++pos) {
            seq.insert(seq.begin() + pos, f);
            auto [d, dl] = route_lower_bound(seq, v, inst);
            st.lb_dist[v] = d;
            st.lb_delay[v] = dl;
            bool ok = true;
            if (st.total_lb_delay() > st.bound + kEps) ok = false;
            if (ok && st.opt.prune &&
                inst.vehicle_params.unit_energy_cost * st.total_lb_dist() >= st.best_f1 - 1e-12)
                ok = false;
            if (ok) {
                st.assignment[f] = owner;
                st.violations += dv;
                exact_dfs(st, depth + 1);
                st.violations -= dv;
                st.assignment[f] = -1;
            }
            seq.erase(seq.begin() + pos);
            st.lb_dist[v] = old_dist;
            st.lb_delay[v] = old_delay;
        }
    }
}


}  // namespace detail

// Exhaustive search over flight-to-fleet assignments and visit orders,
// with charging handled the same way the heuristic handles it. Tiny
// instances only; the guard refuses anything larger.
inline ExactResult solve_exact(const Instance& inst, double t_delay_bound,
                               const ExactOptions& opt = {}) {
    if (inst.num_flights() > 8 || inst.num_vehicles() > 3)
        throw GuardError("exact solver guard: needs |F| <= 8 and |K| <= 3, got |F|=" +
                         std::to_string(inst.num_flights()) +
                         ", |K|=" + std::to_string(inst.num_vehicles()));

    detail::ExactState st(inst, opt, t_delay_bound);
    st.order.resize(inst.num_flights());
    for (int f = 0; f < inst.num_flights(); ++f) st.order[f] = f;
    std::sort(st.order.begin(), st.order.end(),
              [&](int a, int b) { return inst.flights[a].node < inst.flights[b].node; });
    st.routes.assign(inst.num_vehicles(), {});
    st.lb_dist.assign(inst.num_vehicles(), 0.0);
    st.lb_delay.assign(inst.num_vehicles(), 0.0);
    st.assignment.assign(inst.num_flights(), -1);
    for (int v = 0; v < inst.num_vehicles(); ++v) {
        auto [d, dl] = detail::route_lower_bound({}, v, inst);
        st.lb_dist[v] = d;
        st.lb_delay[v] = dl;
    }

    detail::exact_dfs(st, 0);

    if (!st.found)
        throw InfeasibleError("exact solver: no schedule meets the delay bound " +
                              std::to_string(t_delay_bound));

    ExactResult res;
    res.nodes_explored = st.nodes;
    res.proven = true;
    Solution sol = Solution::empty(inst);
    for (int v = 0; v < inst.num_vehicles(); ++v)
        for (std::size_t pos = 0; pos < st.best_routes[v].size(); ++pos)
            commit_insertion(sol, inst, v, static_cast<int>(pos), st.best_routes[v][pos]);
    res.solution = std::move(sol);
    res.optimal_f1 = st.best_f1;
    res.optimal_f2 = st.best_f2;
    return res;
}

}  // namespace towsched
