#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "towsched/allocation.hpp"
#include "towsched/coadh.hpp"
#include "towsched/pareto.hpp"
#include "towsched/schedule.hpp"

namespace towsched {

// Compact, locale-independent number text; "inf" for unbounded values.
inline std::string fmt_num(double v) {
    if (v == kInfinity) return "inf";
    if (v == -kInfinity) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline nlohmann::ordered_json solution_to_json(const Solution& sol, const Instance& inst) {
    auto [f1, f2] = objectives(sol, inst.vehicle_params);
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["mode"] = to_string(sol.mode);
    j["f1"] = f1;
    j["f2"] = f2;
    j["violations"] = sol.violations;

    auto& assign = j["assignment"] = nlohmann::ordered_json::array();
    for (int f = 0; f < inst.num_flights(); ++f)
        assign.push_back({{"flight", inst.flights[f].node}, {"operator", sol.assignment[f]}});
    auto& delays = j["delays"] = nlohmann::ordered_json::array();
    for (int f = 0; f < inst.num_flights(); ++f)
        delays.push_back({{"flight", inst.flights[f].node}, {"delay", sol.flight_delays[f]}});

    auto& trajs = j["trajectories"] = nlohmann::ordered_json::array();
    for (int v = 0; v < inst.num_vehicles(); ++v) {
        const Trajectory& plan = sol.plans[v];
        const VirtualFleet& fleet = inst.fleet_of_vehicle(v);
        nlohmann::ordered_json tj;
        tj["vehicle"] = v;
        tj["operator"] = fleet.owner;
        tj["fleet"] = to_string(fleet.kind);
        auto& visits = tj["visits"] = nlohmann::ordered_json::array();
        for (const Visit& vis : plan.visits) {
            const Node& node = inst.graph.nodes[vis.node];
            nlohmann::ordered_json vj{{"node", node.id},
                                      {"kind", to_string(node.kind)},
                                      {"arrive", vis.arrive},
                                      {"service_start", vis.service_start},
                                      {"service_end", vis.service_end},
                                      {"depart", vis.depart},
                                      {"soc", vis.soc_on_arrival}};
            if (node.kind == NodeKind::Charger) vj["charge_duration"] = vis.charge_duration;
            visits.push_back(vj);
        }
        trajs.push_back(tj);
    }
    return j;
}

inline std::string pareto_to_csv(const ParetoSet& set, const std::string& solver,
                                 std::uint64_t seed) {
    std::ostringstream out;
    out << "bound,f1,f2,solver,seed\n";
    for (const ParetoPoint& p : set.points)
        out << fmt_num(p.bound) << ',' << fmt_num(p.f1) << ',' << fmt_num(p.f2) << ',' << solver
            << ',' << seed << "\n";
    return out.str();
}

inline std::string allocation_to_csv(const AllocationReport& report, const std::string& scenario) {
    std::ostringstream out;
    out << "scenario,pareto_point,operator,rho1,rho2,rho3,rho,phi,total_cost,utility,method\n";
    for (const AllocationRow& r : report.rows)
        out << scenario << ',' << r.point << ',' << r.op << ',' << fmt_num(r.rho1) << ','
            << fmt_num(r.rho2) << ',' << fmt_num(r.rho3) << ',' << fmt_num(r.rho) << ','
            << fmt_num(r.phi) << ',' << fmt_num(r.total_cost) << ',' << fmt_num(r.utility) << ','
            << r.method << "\n";
    return out.str();
}

struct CompareRow {
    std::string sweep = "base";
    double value = 0.0;
    double dis_os = 0.0, dis_oc = 0.0, delta_f1 = 0.0;
    double del_os = 0.0, del_oc = 0.0, delta_f2 = 0.0;
};

inline std::string compare_to_csv(const std::vector<CompareRow>& rows) {
    std::ostringstream out;
    out << "sweep,value,dis_os,dis_oc,delta_f1,del_os,del_oc,delta_f2\n";
    for (const CompareRow& r : rows)
        out << r.sweep << ',' << fmt_num(r.value) << ',' << fmt_num(r.dis_os) << ','
            << fmt_num(r.dis_oc) << ',' << fmt_num(r.delta_f1) << ',' << fmt_num(r.del_os) << ','
            << fmt_num(r.del_oc) << ',' << fmt_num(r.delta_f2) << "\n";
    return out.str();
}

inline std::string trace_to_csv(const std::vector<TraceRow>& trace) {
    std::ostringstream out;
    out << "iteration,temperature,current_eval,best_eval,n,destroy,repair\n";
    for (const TraceRow& t : trace)
        out << t.iteration << ',' << fmt_num(t.temperature) << ',' << fmt_num(t.current_eval)
            << ',' << fmt_num(t.best_eval) << ',' << t.n << ',' << to_string(t.destroy) << ','
            << to_string(t.repair) << "\n";
    return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace towsched
