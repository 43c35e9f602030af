#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "towsched/instance.hpp"
#include "towsched/types.hpp"

namespace towsched {

struct Visit {
    int node = -1;                // node index into graph.nodes
    double arrive = 0.0;          // physical arrival
    double service_start = 0.0;   // max(arrive, earliest) at flights
    double service_end = 0.0;
    double depart = 0.0;
    double soc_on_arrival = 0.0;  // kWh
    double charge_duration = 0.0; // minutes, chargers only
};

struct Trajectory {
    int vehicle = -1;
    int fleet = -1;
    std::vector<Visit> visits;  // depot_out, ..., depot_in
};

// Delay of one service: positive part of service start past the latest
// allowed start.
inline double flight_delay(double service_start, double latest) {
    return std::max(0.0, service_start - latest);
}

// Bare visit skeleton for a vehicle's flight sequence (no chargers, no times).
inline Trajectory make_trajectory(int vehicle, const std::vector<int>& flight_seq,
                                  const Instance& inst) {
    Trajectory t;
    t.vehicle = vehicle;
    t.fleet = inst.vehicle_fleet[vehicle];
    const Operator& op = inst.operators[inst.fleets[t.fleet].owner];
    t.visits.push_back({inst.node_index(op.depot_out)});
    for (int f : flight_seq) t.visits.push_back({inst.node_index(inst.flights[f].node)});
    t.visits.push_back({inst.node_index(op.depot_in)});
    return t;
}

// Walk the flight sequence with a full battery and append a charging visit
// whenever the projected level after completing the next stop would fall
// below the floor Q*gamma. The check runs on the projection, before any
// violation can occur, and vehicles always recharge to full. Chargers are
// ranked by detour distance. Returns nothing if some leg cannot be covered
// even from a full battery.
inline std::optional<Trajectory> insert_charging(const Trajectory& t, const Instance& inst) {
    const VehicleParams& vp = inst.vehicle_params;
    const Graph& g = inst.graph;
    const double floor = vp.min_soc();

    Trajectory out;
    out.vehicle = t.vehicle;
    out.fleet = t.fleet;
    out.visits.reserve(t.visits.size());

    Visit depot = t.visits.front();
    depot.soc_on_arrival = vp.capacity;
    out.visits.push_back(depot);

    int cur = depot.node;
    double soc = vp.capacity;  // level after completing duty at `cur`
    for (std::size_t i = 1; i < t.visits.size(); ++i) {
        Visit v = t.visits[i];
        bool is_flight = g.nodes[v.node].kind == NodeKind::Flight;
        double duty = is_flight ? inst.flights[inst.flight_index(g.nodes[v.node].id)].service_energy : 0.0;

        if (soc - g.energy.at(cur, v.node) - duty < floor - kEps) {
            // pick the reachable charger with the smallest detour
            int best = -1;
            double best_detour = kInfinity;
            for (int e : inst.chargers) {
                if (soc - g.energy.at(cur, e) < floor - kEps) continue;
                if (vp.capacity - g.energy.at(e, v.node) - duty < floor - kEps) continue;
                double detour = g.energy.at(cur, e) + g.energy.at(e, v.node);
                if (detour < best_detour - kEps) {
                    best_detour = detour;
                    best = e;
                }
            }
            if (best < 0) return std::nullopt;
            Visit charge;
            charge.node = best;
            charge.soc_on_arrival = soc - g.energy.at(cur, best);
            out.visits.push_back(charge);
            cur = best;
            soc = vp.capacity;
        }
        v.soc_on_arrival = soc - g.energy.at(cur, v.node);
        out.visits.push_back(v);
        soc = v.soc_on_arrival - duty;
        cur = v.node;
    }
    return out;
}

namespace detail {

inline void propagate_forward(Trajectory& t, const Instance& inst, double depot_depart) {
    const Graph& g = inst.graph;
    const VehicleParams& vp = inst.vehicle_params;
    Visit& first = t.visits.front();
    first.arrive = first.service_start = first.service_end = first.depart = depot_depart;
    for (std::size_t i = 1; i < t.visits.size(); ++i) {
        Visit& v = t.visits[i];
        const Visit& prev = t.visits[i - 1];
        v.arrive = prev.depart + g.travel_time.at(prev.node, v.node);
        switch (g.nodes[v.node].kind) {
            case NodeKind::Flight: {
                const Flight& f = inst.flights[inst.flight_index(g.nodes[v.node].id)];
                v.service_start = std::max(v.arrive, f.earliest);
                v.service_end = v.service_start + f.service_duration;
                break;
            }
            case NodeKind::Charger:
                v.service_start = v.arrive;
                v.charge_duration = (vp.capacity - v.soc_on_arrival) / vp.charge_rate;
                v.service_end = v.service_start + v.charge_duration;
                break;
            default:
                v.service_start = v.service_end = v.arrive;
                break;
        }
        v.depart = v.service_end;
    }
}

// Latest depot departure that leaves every flight's delay unchanged relative
// to the earliest (t0 = 0) schedule.
inline double latest_depot_departure(const Trajectory& t, const Instance& inst) {
    const Graph& g = inst.graph;
    double allowed_arrive = kInfinity;  // bound on arrival at visit i+1
    for (std::size_t i = t.visits.size(); i-- > 1;) {
        const Visit& v = t.visits[i];
        double travel_out = i + 1 < t.visits.size()
                                ? g.travel_time.at(v.node, t.visits[i + 1].node)
                                : 0.0;
        switch (g.nodes[v.node].kind) {
            case NodeKind::Flight: {
                const Flight& f = inst.flights[inst.flight_index(g.nodes[v.node].id)];
                double own = v.service_start > f.latest + kEps ? v.service_start : f.latest;
                double start_bound = std::min(own, allowed_arrive - travel_out - f.service_duration);
                allowed_arrive = start_bound;  // arrival up to the start bound keeps the start
                break;
            }
            case NodeKind::Charger:
                allowed_arrive = allowed_arrive - travel_out - v.charge_duration;
                break;
            default:  // depot_in
                allowed_arrive = kInfinity;
                break;
        }
    }
    double depart_bound = allowed_arrive - g.travel_time.at(t.visits.front().node, t.visits[1].node);
    if (!std::isfinite(depart_bound)) return 0.0;
    return std::max(0.0, depart_bound);
}

}  // namespace detail

// Fill the timetable: arrivals chain tightly from departures, services wait
// for the earliest start, charge durations follow from the arrival level, and
// departures coincide with service end. With no explicit departure time the
// depot departure is pushed as late as possible without growing any delay
// (reporting convenience; objectives are unaffected).
inline Trajectory propagate_timetable(Trajectory t, const Instance& inst,
                                      std::optional<double> depot_depart = std::nullopt) {
    if (t.visits.size() < 2) return t;
    if (depot_depart) {
        detail::propagate_forward(t, inst, *depot_depart);
        return t;
    }
    detail::propagate_forward(t, inst, 0.0);
    double t0 = detail::latest_depot_departure(t, inst);
    if (t0 > kEps) detail::propagate_forward(t, inst, t0);
    return t;
}

// --- solutions ---------------------------------------------------------------

struct EvalParams {
    double c_eval_dl = 1.0;
    double c_eval_pr = 50.0;
    double t_delay = kInfinity;  // epsilon-constraint bound on total delay
};

inline double delay_penalty(double total_delay, const EvalParams& ep) {
    double excess = total_delay - ep.t_delay;
    return excess > 0.0 ? ep.c_eval_dl * excess : 0.0;
}

class Solution {
public:
    Mode mode = Mode::Separated;
    std::vector<std::vector<int>> routes;  // per vehicle, flight indexes in service order
    std::vector<Trajectory> plans;         // charging + timetable, per vehicle
    std::vector<double> route_distance;
    std::vector<double> route_delay;
    std::vector<char> route_feasible;
    std::vector<double> flight_delays;     // by flight index; 0 when unassigned
    std::vector<int> assignment;           // flight index -> operator id, -1 unassigned
    std::vector<int> serving_vehicle;      // flight index -> vehicle, -1 unassigned
    double total_distance = 0.0;
    double total_delay = 0.0;
    int violations = 0;  // priority-constraint violations among assigned pairs

    static Solution empty(const Instance& inst) {
        Solution s;
        s.mode = inst.mode;
        s.routes.assign(inst.num_vehicles(), {});
        s.plans.assign(inst.num_vehicles(), {});
        s.route_distance.assign(inst.num_vehicles(), 0.0);
        s.route_delay.assign(inst.num_vehicles(), 0.0);
        s.route_feasible.assign(inst.num_vehicles(), 1);
        s.flight_delays.assign(inst.num_flights(), 0.0);
        s.assignment.assign(inst.num_flights(), -1);
        s.serving_vehicle.assign(inst.num_flights(), -1);
        for (int v = 0; v < inst.num_vehicles(); ++v) s.rebuild_route(v, inst);
        return s;
    }

    bool feasible() const {
        for (char ok : route_feasible)
            if (!ok) return false;
        return true;
    }

    bool complete() const {
        for (int a : assignment)
            if (a < 0) return false;
        return true;
    }

    // Recompute the plan and cached costs of one vehicle's route.
    // Returns false (and marks the route) when charging cannot be restored.
    bool rebuild_route(int v, const Instance& inst) {
        total_distance -= route_distance[v];
        total_delay -= route_delay[v];
        Trajectory bare = make_trajectory(v, routes[v], inst);
        auto charged = insert_charging(bare, inst);
        double dist = 0.0, delay = 0.0;
        if (!charged) {
            plans[v] = bare;
            route_feasible[v] = 0;
            for (int f : routes[v]) flight_delays[f] = 0.0;
            route_distance[v] = 0.0;
            route_delay[v] = 0.0;
            return false;
        }
        plans[v] = propagate_timetable(std::move(*charged), inst);
        const Trajectory& plan = plans[v];
        for (std::size_t i = 1; i < plan.visits.size(); ++i)
            dist += inst.graph.distance.at(plan.visits[i - 1].node, plan.visits[i].node);
        for (const Visit& vis : plan.visits) {
            if (inst.graph.nodes[vis.node].kind != NodeKind::Flight) continue;
            int f = inst.flight_index(inst.graph.nodes[vis.node].id);
            double d = flight_delay(vis.service_start, inst.flights[f].latest);
            flight_delays[f] = d;
            delay += d;
        }
        route_feasible[v] = 1;
        route_distance[v] = dist;
        route_delay[v] = delay;
        total_distance += dist;
        total_delay += delay;
        return true;
    }
};

// Count of assigned overlapping pairs where some operator got only the
// lower-priority flight: pairs {i, j} and operators r with
// (z_ir - z_jr) * q_ij * (p_ir - p_jr) < 0. Zero means the priority
// constraint holds. Pairs with an unassigned member do not count.
inline int priority_violations(const Solution& sol, const Instance& inst) {
    int count = 0;
    int fcount = inst.num_flights();
    for (int i = 0; i < fcount; ++i) {
        if (sol.assignment[i] < 0) continue;
        for (int j = i + 1; j < fcount; ++j) {
            if (sol.assignment[j] < 0 || !inst.overlap[i][j]) continue;
            for (const Operator& op : inst.operators) {
                int zi = sol.assignment[i] == op.id;
                int zj = sol.assignment[j] == op.id;
                if (zi == zj) continue;
                int dp = inst.priority_of(i, op.id) - inst.priority_of(j, op.id);
                if ((zi - zj) * dp < 0) ++count;
            }
        }
    }
    return count;
}

// Change in the violation count if flight f were assigned to operator r,
// given the other assignments in `sol` (f itself must be unassigned).
inline int violation_delta(const Solution& sol, const Instance& inst, int f, int r) {
    int delta = 0;
    for (int j = 0; j < inst.num_flights(); ++j) {
        if (j == f || sol.assignment[j] < 0 || !inst.overlap[f][j]) continue;
        for (const Operator& op : inst.operators) {
            int zf = r == op.id;
            int zj = sol.assignment[j] == op.id;
            if (zf == zj) continue;
            int dp = inst.priority_of(f, op.id) - inst.priority_of(j, op.id);
            if ((zf - zj) * dp < 0) ++delta;
        }
    }
    return delta;
}

inline std::pair<double, double> objectives(const Solution& sol, const VehicleParams& vp) {
    return {vp.unit_energy_cost * sol.total_distance, sol.total_delay};
}

// Fitness used by the search: energy cost plus clamped penalties. Separated
// mode scores delay only; cooperated mode adds the priority penalty.
inline double evaluate(const Solution& sol, const Instance& inst, const EvalParams& ep) {
    double f1 = inst.vehicle_params.unit_energy_cost * sol.total_distance;
    double value = f1 + delay_penalty(sol.total_delay, ep);
    if (sol.mode == Mode::Cooperated) value += ep.c_eval_pr * sol.violations;
    return value;
}

// --- incremental editing used by the neighborhood search ---------------------

// Cost deltas of inserting flight f at routes[v][pos]; nullopt when the fleet
// cannot serve f or charging cannot be restored on the tentative route.
struct InsertionEval {
    double delta_eval = 0.0;     // full evaluate increment
    double delta_f1 = 0.0;
    double delta_delay = 0.0;    // raw minutes
    double delta_dl_penalty = 0.0;
    int delta_violations = 0;
};

inline std::optional<InsertionEval> evaluate_insertion(const Solution& sol, const Instance& inst,
                                                       const EvalParams& ep, int v, int pos, int f) {
    const VirtualFleet& fleet = inst.fleet_of_vehicle(v);
    if (!fleet.serviceable[f]) return std::nullopt;

    std::vector<int> seq = sol.routes[v];
    seq.insert(seq.begin() + pos, f);
    auto charged = insert_charging(make_trajectory(v, seq, inst), inst);
    if (!charged) return std::nullopt;
    Trajectory plan = propagate_timetable(std::move(*charged), inst);

    double dist = 0.0, delay = 0.0;
    for (std::size_t i = 1; i < plan.visits.size(); ++i)
        dist += inst.graph.distance.at(plan.visits[i - 1].node, plan.visits[i].node);
    for (const Visit& vis : plan.visits) {
        if (inst.graph.nodes[vis.node].kind != NodeKind::Flight) continue;
        int fi = inst.flight_index(inst.graph.nodes[vis.node].id);
        delay += flight_delay(vis.service_start, inst.flights[fi].latest);
    }

    InsertionEval ev;
    ev.delta_f1 = inst.vehicle_params.unit_energy_cost * (dist - sol.route_distance[v]);
    ev.delta_delay = delay - sol.route_delay[v];
    ev.delta_dl_penalty =
        delay_penalty(sol.total_delay + ev.delta_delay, ep) - delay_penalty(sol.total_delay, ep);
    ev.delta_violations = violation_delta(sol, inst, f, fleet.owner);
    ev.delta_eval = ev.delta_f1 + ev.delta_dl_penalty;
    if (sol.mode == Mode::Cooperated) ev.delta_eval += ep.c_eval_pr * ev.delta_violations;
    return ev;
}

inline void commit_insertion(Solution& sol, const Instance& inst, int v, int pos, int f) {
    sol.violations += violation_delta(sol, inst, f, inst.fleet_of_vehicle(v).owner);
    sol.routes[v].insert(sol.routes[v].begin() + pos, f);
    sol.assignment[f] = inst.fleet_of_vehicle(v).owner;
    sol.serving_vehicle[f] = v;
    sol.rebuild_route(v, inst);
}

// Remove flight f from its route; returns the vehicle it was on.
inline int remove_flight(Solution& sol, const Instance& inst, int f) {
    int v = sol.serving_vehicle[f];
    sol.assignment[f] = -1;
    sol.serving_vehicle[f] = -1;
    sol.violations -= violation_delta(sol, inst, f, inst.fleet_of_vehicle(v).owner);
    auto& seq = sol.routes[v];
    seq.erase(std::find(seq.begin(), seq.end(), f));
    sol.flight_delays[f] = 0.0;
    sol.rebuild_route(v, inst);
    return v;
}

}  // namespace towsched
