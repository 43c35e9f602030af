#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "towsched/instance.hpp"
#include "towsched/serialize.hpp"

namespace towsched {

// LP-format export of the full linear model. Variables:
//   x_i_j_k   arc (i, j) traversed by vehicle k          (binary)
//   a_i_k     service/charge start of vehicle k at i     (continuous)
//   b_i_k     departure of vehicle k from i              (continuous)
//   y_i_k     battery level of vehicle k arriving at i   (continuous)
//   z_f_r     flight f assigned to operator r            (binary, cooperated)
//   tdl_f_k   delay of vehicle k at flight f             (continuous)
// i, j, f are node ids, k is a vehicle index, r an operator id. Arcs run
// from a vehicle's own outbound depot over flight/charger nodes to its own
// inbound depot; flight endpoints are limited to the vehicle's serviceable
// set. Service and charging completion times are substituted into the
// departure bounds, so no extra end-time variables appear.

namespace detail {

struct Arc {
    int from, to;  // node indexes
};

// Directed arcs available to one vehicle.
inline std::vector<Arc> vehicle_arcs(const Instance& inst, int k) {
    const VirtualFleet& fleet = inst.fleet_of_vehicle(k);
    const Operator& op = inst.operators[fleet.owner];
    int out = inst.node_index(op.depot_out);
    int in = inst.node_index(op.depot_in);

    std::vector<int> mids;  // serviceable flights + all chargers
    for (int f = 0; f < inst.num_flights(); ++f)
        if (fleet.serviceable[f]) mids.push_back(inst.node_index(inst.flights[f].node));
    for (int e : inst.chargers) mids.push_back(e);

    std::vector<Arc> arcs;
    arcs.push_back({out, in});
    for (int m : mids) {
        arcs.push_back({out, m});
        arcs.push_back({m, in});
        for (int m2 : mids)
            if (m2 != m) arcs.push_back({m, m2});
    }
    return arcs;
}

inline std::string term(double coeff, const std::string& var, bool first) {
    std::ostringstream s;
    if (first) {
        s << (coeff < 0 ? " - " : " ");
    } else {
        s << (coeff < 0 ? " - " : " + ");
    }
    double mag = coeff < 0 ? -coeff : coeff;
    if (mag != 1.0) s << fmt_num(mag) << ' ';
    s << var;
    return s.str();
}

}  // namespace detail

inline std::string export_milp_text(const Instance& inst, double t_delay_bound) {
    const Graph& g = inst.graph;
    const VehicleParams& vp = inst.vehicle_params;
    int K = inst.num_vehicles();
    bool coop = inst.mode == Mode::Cooperated;

    auto node_id = [&](int idx) { return g.nodes[idx].id; };
    auto xvar = [&](int i, int j, int k) {
        return "x_" + std::to_string(node_id(i)) + "_" + std::to_string(node_id(j)) + "_" +
               std::to_string(k);
    };
    auto tvar = [&](const char* base, int i, int k) {
        return std::string(base) + "_" + std::to_string(node_id(i)) + "_" + std::to_string(k);
    };

    std::vector<std::vector<detail::Arc>> arcs(K);
    for (int k = 0; k < K; ++k) arcs[k] = detail::vehicle_arcs(inst, k);

    std::ostringstream lp;
    lp << "\\ electric tow tractor scheduling, " << to_string(inst.mode) << " mode\n";
    lp << "\\ delay bound: " << fmt_num(t_delay_bound) << "\n";
    lp << "Minimize\n obj:";
    {
        bool first = true;
        for (int k = 0; k < K; ++k)
            for (const auto& a : arcs[k]) {
                lp << detail::term(vp.unit_energy_cost * g.distance.at(a.from, a.to),
                                   xvar(a.from, a.to, k), first);
                first = false;
            }
    }
    lp << "\nSubject To\n";

    // each vehicle leaves its depot once and returns once
    for (int k = 0; k < K; ++k) {
        const Operator& op = inst.operators[inst.fleet_of_vehicle(k).owner];
        int out = inst.node_index(op.depot_out);
        int in = inst.node_index(op.depot_in);
        lp << " depart_" << k << ":";
        bool first = true;
        for (const auto& a : arcs[k])
            if (a.from == out) {
                lp << detail::term(1, xvar(a.from, a.to, k), first);
                first = false;
            }
        lp << " = 1\n";
        lp << " return_" << k << ":";
        first = true;
        for (const auto& a : arcs[k])
            if (a.to == in) {
                lp << detail::term(1, xvar(a.from, a.to, k), first);
                first = false;
            }
        lp << " = 1\n";
    }

    // flow conservation at every flight/charger node a vehicle may touch
    for (int k = 0; k < K; ++k) {
        std::vector<char> mid(g.size(), 0);
        for (const auto& a : arcs[k]) {
            if (g.nodes[a.from].kind == NodeKind::Flight || g.nodes[a.from].kind == NodeKind::Charger)
                mid[a.from] = 1;
            if (g.nodes[a.to].kind == NodeKind::Flight || g.nodes[a.to].kind == NodeKind::Charger)
                mid[a.to] = 1;
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!mid[i]) continue;
            lp << " flow_" << node_id(static_cast<int>(i)) << "_" << k << ":";
            bool first = true;
            for (const auto& a : arcs[k]) {
                if (a.to == static_cast<int>(i)) {
                    lp << detail::term(1, xvar(a.from, a.to, k), first);
                    first = false;
                }
                if (a.from == static_cast<int>(i)) {
                    lp << detail::term(-1, xvar(a.from, a.to, k), first);
                    first = false;
                }
            }
            lp << " = 0\n";
        }
    }

    // coverage: separated mode ties flights straight to vehicles, cooperated
    // mode routes them through the assignment variables
    for (int f = 0; f < inst.num_flights(); ++f) {
        int fn = inst.node_index(inst.flights[f].node);
        if (!coop) {
            lp << " cover_" << node_id(fn) << ":";
            bool first = true;
            for (int k = 0; k < K; ++k)
                for (const auto& a : arcs[k])
                    if (a.from == fn) {
                        lp << detail::term(1, xvar(a.from, a.to, k), first);
                        first = false;
                    }
            lp << " = 1\n";
        } else {
            lp << " assign_" << node_id(fn) << ":";
            bool first = true;
            for (int r = 0; r < inst.num_operators(); ++r)
                if (inst.operator_serviceable(r)[f]) {
                    lp << ' '
                       << detail::term(1, "z_" + std::to_string(node_id(fn)) + "_" + std::to_string(r),
                                       first);
                    first = false;
                }
            lp << " = 1\n";
            for (int r = 0; r < inst.num_operators(); ++r) {
                if (!inst.operator_serviceable(r)[f]) continue;
                lp << " link_" << node_id(fn) << "_" << r << ":";
                first = true;
                for (int k = 0; k < K; ++k) {
                    if (inst.fleet_of_vehicle(k).owner != r) continue;
                    for (const auto& a : arcs[k])
                        if (a.from == fn) {
                            lp << detail::term(1, xvar(a.from, a.to, k), first);
                            first = false;
                        }
                }
                lp << detail::term(-1, "z_" + std::to_string(node_id(fn)) + "_" + std::to_string(r),
                                   false)
                   << " = 0\n";
            }
        }
    }

    // time chaining along traversed arcs, big-M deactivated otherwise
    for (int k = 0; k < K; ++k)
        for (const auto& a : arcs[k]) {
            lp << " time_" << node_id(a.from) << "_" << node_id(a.to) << "_" << k << ":"
               << detail::term(1, tvar("a", a.to, k), true)
               << detail::term(-1, tvar("b", a.from, k), false)
               << detail::term(-(g.travel_time.at(a.from, a.to) + g.big_m), xvar(a.from, a.to, k),
                               false)
               << " >= " << fmt_num(-g.big_m) << "\n";
        }

    // flight services: window opening and service completion before departure
    for (int k = 0; k < K; ++k) {
        const VirtualFleet& fleet = inst.fleet_of_vehicle(k);
        for (int f = 0; f < inst.num_flights(); ++f) {
            if (!fleet.serviceable[f]) continue;
            int fn = inst.node_index(inst.flights[f].node);
            lp << " tw_" << node_id(fn) << "_" << k << ":" << detail::term(1, tvar("a", fn, k), true)
               << " >= " << fmt_num(inst.flights[f].earliest) << "\n";
            lp << " svc_" << node_id(fn) << "_" << k << ":" << detail::term(1, tvar("b", fn, k), true)
               << detail::term(-1, tvar("a", fn, k), false)
               << " >= " << fmt_num(inst.flights[f].service_duration) << "\n";
        }
    }

    // charging: departure waits for the full recharge (Q - y) / charge rate
    for (int k = 0; k < K; ++k)
        for (int e : inst.chargers) {
            lp << " chg_" << node_id(e) << "_" << k << ":" << detail::term(1, tvar("b", e, k), true)
               << detail::term(-1, tvar("a", e, k), false)
               << detail::term(1.0 / vp.charge_rate, tvar("y", e, k), false)
               << " >= " << fmt_num(vp.capacity / vp.charge_rate) << "\n";
        }

    // battery chaining: out of flights it drops by travel + service energy,
    // out of depots/chargers the vehicle starts full
    for (int k = 0; k < K; ++k)
        for (const auto& a : arcs[k]) {
            NodeKind from_kind = g.nodes[a.from].kind;
            if (from_kind == NodeKind::Flight) {
                const Flight& f = inst.flights[inst.flight_index(node_id(a.from))];
                double drop = g.energy.at(a.from, a.to) + f.service_energy;
                lp << " soc_" << node_id(a.from) << "_" << node_id(a.to) << "_" << k << ":"
                   << detail::term(1, tvar("y", a.to, k), true)
                   << detail::term(-1, tvar("y", a.from, k), false)
                   << detail::term(drop + vp.capacity, xvar(a.from, a.to, k), false)
                   << " <= " << fmt_num(vp.capacity) << "\n";
            } else {
                lp << " soc_" << node_id(a.from) << "_" << node_id(a.to) << "_" << k << ":"
                   << detail::term(1, tvar("y", a.to, k), true)
                   << detail::term(g.energy.at(a.from, a.to), xvar(a.from, a.to, k), false)
                   << " <= " << fmt_num(vp.capacity) << "\n";
            }
        }

    // linearized delays and the epsilon bound on their sum
    for (int k = 0; k < K; ++k) {
        const VirtualFleet& fleet = inst.fleet_of_vehicle(k);
        for (int f = 0; f < inst.num_flights(); ++f) {
            if (!fleet.serviceable[f]) continue;
            int fn = inst.node_index(inst.flights[f].node);
            lp << " dl_" << node_id(fn) << "_" << k << ":" << detail::term(1, tvar("tdl", fn, k), true)
               << detail::term(-1, tvar("a", fn, k), false)
               << " >= " << fmt_num(-inst.flights[f].latest) << "\n";
        }
    }
    if (t_delay_bound != kInfinity) {
        lp << " eps:";
        bool first = true;
        for (int k = 0; k < K; ++k)
            for (int f = 0; f < inst.num_flights(); ++f) {
                int fn = inst.node_index(inst.flights[f].node);
                lp << detail::term(1, tvar("tdl", fn, k), first);
                first = false;
            }
        lp << " <= " << fmt_num(t_delay_bound) << "\n";
    }

    // assignment-side priority rows: whenever windows overlap and the
    // priorities differ, the higher-priority flight cannot be passed over
    if (coop) {
        for (int r = 0; r < inst.num_operators(); ++r) {
            std::vector<char> serviceable = inst.operator_serviceable(r);
            for (int i = 0; i < inst.num_flights(); ++i)
                for (int j = 0; j < inst.num_flights(); ++j) {
                    if (i == j || !serviceable[i] || !serviceable[j] || !inst.overlap[i][j]) continue;
                    int dp = inst.priority_of(i, r) - inst.priority_of(j, r);
                    if (dp <= 0) continue;  // symmetric pair emits the mirrored row
                    int ni = inst.node_index(inst.flights[i].node);
                    int nj = inst.node_index(inst.flights[j].node);
                    lp << " prio_" << node_id(ni) << "_" << node_id(nj) << "_" << r << ":"
                       << detail::term(1, "z_" + std::to_string(node_id(ni)) + "_" + std::to_string(r),
                                       true)
                       << detail::term(-1, "z_" + std::to_string(node_id(nj)) + "_" + std::to_string(r),
                                       false)
                       << " >= 0\n";
                }
        }
    }

    lp << "Bounds\n";
    std::vector<char> touched(g.size(), 0);
    for (int k = 0; k < K; ++k) {
        std::fill(touched.begin(), touched.end(), 0);
        for (const auto& a : arcs[k]) touched[a.from] = touched[a.to] = 1;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (touched[i])
                lp << " " << fmt_num(vp.capacity * vp.min_soc_fraction) << " <= "
                   << tvar("y", static_cast<int>(i), k) << " <= " << fmt_num(vp.capacity) << "\n";
    }

    lp << "Binaries\n";
    for (int k = 0; k < K; ++k)
        for (const auto& a : arcs[k]) lp << " " << xvar(a.from, a.to, k) << "\n";
    if (coop)
        for (int f = 0; f < inst.num_flights(); ++f)
            for (int r = 0; r < inst.num_operators(); ++r)
                if (inst.operator_serviceable(r)[f])
                    lp << " z_" << std::to_string(node_id(inst.node_index(inst.flights[f].node)))
                       << "_" << r << "\n";
    lp << "End\n";
    return lp.str();
}

inline void export_milp(const Instance& inst, double t_delay_bound, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write LP file: " + path);
    out << export_milp_text(inst, t_delay_bound);
}

}  // namespace towsched
