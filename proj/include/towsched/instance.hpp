#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "towsched/types.hpp"

namespace towsched {

enum class FleetKind { NonShared, Shared };

inline std::string to_string(FleetKind k) {
    return k == FleetKind::Shared ? "shared" : "non_shared";
}

// One side of an operator's virtual split. In separated mode every operator
// maps to a single non-shared fleet; in cooperated mode an operator with
// shared_count > 0 additionally owns a shared fleet whose serviceable set is
// widened by priority marks and the service radius. Empty fleets are dropped.
struct VirtualFleet {
    int owner = 0;
    FleetKind kind = FleetKind::NonShared;
    std::vector<int> vehicle_ids;
    std::vector<char> serviceable;  // by flight index
};

class Instance {
public:
    Graph graph;
    std::vector<Flight> flights;
    std::vector<Operator> operators;
    VehicleParams vehicle_params;
    Mode mode = Mode::Separated;
    // Coalition membership by operator id; empty means everyone cooperates.
    // Sharing between a member and a non-member is cut in both directions.
    std::vector<char> coalition;

    // Derived (built by finalize()):
    std::vector<std::vector<char>> overlap;   // q_ij by flight index, symmetric, zero diagonal
    std::vector<VirtualFleet> fleets;
    std::vector<int> vehicle_fleet;           // vehicle id -> fleet index
    std::vector<int> chargers;                // node indexes of charging nodes
    std::vector<std::vector<int>> own_flights;  // operator -> flight indexes

    int num_vehicles() const { return static_cast<int>(vehicle_fleet.size()); }
    int num_flights() const { return static_cast<int>(flights.size()); }
    int num_operators() const { return static_cast<int>(operators.size()); }

    int node_index(int node_id) const {
        auto it = node_index_.find(node_id);
        if (it == node_index_.end())
            throw ScenarioError("dangling node reference: " + std::to_string(node_id));
        return it->second;
    }
    int flight_index(int node_id) const {
        auto it = flight_index_.find(node_id);
        if (it == flight_index_.end())
            throw ScenarioError("node is not a flight: " + std::to_string(node_id));
        return it->second;
    }

    double dist_nodes(int i, int j) const { return graph.distance.at(i, j); }
    double dist_flight_to_node(int f, int node_idx) const {
        return graph.distance.at(node_index(flights[f].node), node_idx);
    }

    // p_fr with absent entries read as 0.
    int priority_of(int flight_idx, int op) const {
        int node = flights[flight_idx].node;
        for (const auto& [n, p] : operators[op].priority)
            if (n == node) return p;
        return 0;
    }

    const VirtualFleet& fleet_of_vehicle(int vehicle) const { return fleets[vehicle_fleet[vehicle]]; }

    // Serviceable set of operator r at the original-operator level: the union
    // over its fleets. Useful for Eq.-25-style checks.
    std::vector<char> operator_serviceable(int op) const {
        std::vector<char> s(flights.size(), 0);
        for (const auto& fl : fleets)
            if (fl.owner == op)
                for (std::size_t f = 0; f < s.size(); ++f) s[f] |= fl.serviceable[f];
        return s;
    }

    void finalize();  // validates invariants and rebuilds all derived state

private:
    std::map<int, int> node_index_;
    std::map<int, int> flight_index_;
};

// --- core derivations -------------------------------------------------------

// q_ij = 1 iff the closed windows [earliest_i, latest_i] and
// [earliest_j, latest_j] intersect; shared endpoints count as overlap.
inline std::vector<std::vector<char>> overlap_flags(const std::vector<Flight>& flights) {
    std::size_t n = flights.size();
    std::vector<std::vector<char>> q(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            bool hit = flights[i].earliest <= flights[j].latest &&
                       flights[j].earliest <= flights[i].latest;
            q[i][j] = q[j][i] = hit ? 1 : 0;
        }
    return q;
}

// The literal sharing set of an operator: flights it marks priority 1 plus
// flights whose stand lies within service_radius of its outbound depot.
// Own flights are NOT force-included here; resource-contribution scoring
// needs the raw set.
inline std::vector<char> sharing_set(const Operator& op, const Instance& inst) {
    std::vector<char> s(inst.flights.size(), 0);
    int depot = inst.node_index(op.depot_out);
    for (int f = 0; f < inst.num_flights(); ++f) {
        if (inst.priority_of(f, op.id) == 1) s[f] = 1;
        if (inst.dist_flight_to_node(f, depot) <= op.service_radius + kEps) s[f] = 1;
    }
    return s;
}

// Flights operator `op` may serve in cooperated mode: the sharing set plus,
// always, its own flights. Foreign flights across a coalition boundary are
// excluded.
inline std::vector<char> serviceable_set(const Operator& op, const Instance& inst) {
    std::vector<char> s = sharing_set(op, inst);
    for (int f = 0; f < inst.num_flights(); ++f) {
        int owner = inst.flights[f].owner;
        if (owner == op.id) {
            s[f] = 1;
        } else if (!inst.coalition.empty() && !(inst.coalition[op.id] && inst.coalition[owner])) {
            s[f] = 0;
        }
    }
    return s;
}

// Split every operator into a non-shared fleet (own flights only) and a
// shared fleet (serviceable set above). Vehicle ids are assigned
// contiguously by operator id, non-shared vehicles first. Fleets with no
// vehicles are dropped. Costs stay attributed to the original operator; the
// split exists only for scheduling.
inline std::vector<VirtualFleet> split_virtual_operators(const Instance& inst) {
    std::vector<VirtualFleet> out;
    int next_vehicle = 0;
    for (const auto& op : inst.operators) {
        std::vector<char> own(inst.flights.size(), 0);
        for (int f = 0; f < inst.num_flights(); ++f)
            if (inst.flights[f].owner == op.id) own[f] = 1;

        int non_shared = op.fleet_size - op.shared_count;
        if (inst.mode == Mode::Separated) {
            VirtualFleet fl{op.id, FleetKind::NonShared, {}, own};
            for (int k = 0; k < op.fleet_size; ++k) fl.vehicle_ids.push_back(next_vehicle++);
            if (!fl.vehicle_ids.empty()) out.push_back(std::move(fl));
            continue;
        }
        VirtualFleet priv{op.id, FleetKind::NonShared, {}, own};
        for (int k = 0; k < non_shared; ++k) priv.vehicle_ids.push_back(next_vehicle++);
        VirtualFleet shared{op.id, FleetKind::Shared, {}, serviceable_set(op, inst)};
        for (int k = 0; k < op.shared_count; ++k) shared.vehicle_ids.push_back(next_vehicle++);
        if (!priv.vehicle_ids.empty()) out.push_back(std::move(priv));
        if (!shared.vehicle_ids.empty()) out.push_back(std::move(shared));
    }
    return out;
}

inline void build_matrices_from_coordinates(Graph& g, const VehicleParams& vp) {
    std::size_t n = g.nodes.size();
    if (g.distance.size() != n) {
        g.distance = SquareMatrix(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double dx = g.nodes[i].x - g.nodes[j].x;
                double dy = g.nodes[i].y - g.nodes[j].y;
                g.distance.at(i, j) = std::sqrt(dx * dx + dy * dy);
            }
    }
    g.travel_time = SquareMatrix(n);
    g.energy = SquareMatrix(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            g.travel_time.at(i, j) = g.distance.at(i, j) * vp.minutes_per_meter();
            g.energy.at(i, j) = g.distance.at(i, j) * vp.kwh_per_meter();
        }
}

inline void Instance::finalize() {
    node_index_.clear();
    flight_index_.clear();
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        if (!node_index_.emplace(graph.nodes[i].id, static_cast<int>(i)).second)
            throw ScenarioError("nodes[" + std::to_string(i) + "]: duplicate node id " +
                                std::to_string(graph.nodes[i].id));
    }

    if (vehicle_params.capacity <= 0 || vehicle_params.speed <= 0 ||
        vehicle_params.consumption_rate <= 0 || vehicle_params.charge_rate <= 0 ||
        vehicle_params.unit_energy_cost <= 0)
        throw ScenarioError("vehicle_params: all rates must be strictly positive");
    if (vehicle_params.min_soc_fraction < 0 || vehicle_params.min_soc_fraction >= 1)
        throw ScenarioError("vehicle_params.min_soc_fraction: must lie in [0, 1)");

    if (graph.distance.size() != 0 && graph.distance.size() != graph.nodes.size())
        throw ScenarioError("distance_matrix: size does not match node count");
    build_matrices_from_coordinates(graph, vehicle_params);
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        if (graph.distance.at(i, i) != 0.0)
            throw ScenarioError("distance_matrix: nonzero diagonal at node " +
                                std::to_string(graph.nodes[i].id));
        for (std::size_t j = 0; j < graph.nodes.size(); ++j)
            if (graph.distance.at(i, j) < 0.0)
                throw ScenarioError("distance_matrix: negative entry");
    }

    double max_latest = 0.0;
    for (std::size_t i = 0; i < flights.size(); ++i) {
        const Flight& f = flights[i];
        std::string where = "flights[" + std::to_string(i) + "]";
        int idx = node_index(f.node);
        if (graph.nodes[idx].kind != NodeKind::Flight)
            throw ScenarioError(where + ".node: node " + std::to_string(f.node) + " is not a flight node");
        if (f.earliest < 0 || f.latest < f.earliest)
            throw ScenarioError(where + ": requires 0 <= earliest <= latest (flight node " +
                                std::to_string(f.node) + ")");
        if (f.service_duration <= 0) throw ScenarioError(where + ".service_duration: must be > 0");
        if (f.service_energy < 0) throw ScenarioError(where + ".service_energy: must be >= 0");
        if (!flight_index_.emplace(f.node, static_cast<int>(i)).second)
            throw ScenarioError(where + ": flight node listed twice");
        max_latest = std::max(max_latest, f.latest);
    }
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
        if (graph.nodes[i].kind == NodeKind::Flight && !flight_index_.count(graph.nodes[i].id))
            throw ScenarioError("nodes[" + std::to_string(i) + "]: flight node " +
                                std::to_string(graph.nodes[i].id) + " has no flight entry");

    if (graph.horizon <= 0) graph.horizon = max_latest;
    if (graph.big_m <= 0) graph.big_m = graph.horizon;
    if (graph.horizon + kEps < max_latest)
        throw ScenarioError("horizon: smaller than the latest flight start");
    if (graph.big_m + kEps < graph.horizon) throw ScenarioError("big_m: must be >= horizon");

    std::set<int> op_ids;
    for (std::size_t r = 0; r < operators.size(); ++r) {
        const Operator& op = operators[r];
        std::string where = "operators[" + std::to_string(r) + "]";
        if (op.id != static_cast<int>(r))
            throw ScenarioError(where + ": operator ids must be 0..R-1 in listing order");
        if (!op_ids.insert(op.id).second) throw ScenarioError(where + ": duplicate operator id");
        int dout = node_index(op.depot_out);
        int din = node_index(op.depot_in);
        if (graph.nodes[dout].kind != NodeKind::DepotOut)
            throw ScenarioError(where + ".depot_out: node kind mismatch");
        if (graph.nodes[din].kind != NodeKind::DepotIn)
            throw ScenarioError(where + ".depot_in: node kind mismatch");
        if (op.fleet_size < 0 || op.shared_count < 0 || op.shared_count > op.fleet_size)
            throw ScenarioError(where + ": requires 0 <= shared_count <= fleet_size");
        if (op.service_radius < 0) throw ScenarioError(where + ".service_radius: must be >= 0");
        if (op.unit_delay_cost < 0) throw ScenarioError(where + ".unit_delay_cost: must be >= 0");
        for (const auto& [node, p] : op.priority) {
            if (!flight_index_.count(node))
                throw ScenarioError(where + ".priority: unknown flight node " + std::to_string(node));
            if (p != 0 && p != 1)
                throw ScenarioError(where + ".priority: value must be 0 or 1");
        }
    }
    for (const Flight& f : flights)
        if (!op_ids.count(f.owner))
            throw ScenarioError("flight node " + std::to_string(f.node) + ": unknown owner operator " +
                                std::to_string(f.owner));

    overlap = overlap_flags(flights);
    own_flights.assign(operators.size(), {});
    for (int f = 0; f < num_flights(); ++f) own_flights[flights[f].owner].push_back(f);

    chargers.clear();
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
        if (graph.nodes[i].kind == NodeKind::Charger) chargers.push_back(static_cast<int>(i));

    fleets = split_virtual_operators(*this);
    int total = 0;
    for (const auto& op : operators) total += op.fleet_size;
    vehicle_fleet.assign(total, -1);
    for (std::size_t fi = 0; fi < fleets.size(); ++fi)
        for (int v : fleets[fi].vehicle_ids) vehicle_fleet[v] = static_cast<int>(fi);
}

// --- JSON scenario files ----------------------------------------------------

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& key,
                                     const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ScenarioError(where + ": missing field '" + key + "'");
    return *it;
}

}  // namespace detail

inline Instance instance_from_json(const nlohmann::json& j) {
    using detail::require;
    Instance inst;
    try {
        if (require(j, "schema", "scenario").get<int>() != 1)
            throw ScenarioError("scenario.schema: unsupported version");
        std::string mode = require(j, "mode", "scenario").get<std::string>();
        if (mode == "separated") inst.mode = Mode::Separated;
        else if (mode == "cooperated") inst.mode = Mode::Cooperated;
        else throw ScenarioError("scenario.mode: expected 'separated' or 'cooperated'");

        for (const auto& nj : require(j, "nodes", "scenario")) {
            Node n;
            n.id = require(nj, "id", "node").get<int>();
            std::string kind = require(nj, "kind", "node").get<std::string>();
            if (kind == "flight") n.kind = NodeKind::Flight;
            else if (kind == "depot_out") n.kind = NodeKind::DepotOut;
            else if (kind == "depot_in") n.kind = NodeKind::DepotIn;
            else if (kind == "charging") n.kind = NodeKind::Charger;
            else throw ScenarioError("node " + std::to_string(n.id) + ": unknown kind '" + kind + "'");
            n.x = require(nj, "x", "node").get<double>();
            n.y = require(nj, "y", "node").get<double>();
            inst.graph.nodes.push_back(n);
        }
        for (const auto& fj : require(j, "flights", "scenario")) {
            Flight f;
            f.node = require(fj, "node", "flight").get<int>();
            f.owner = require(fj, "owner", "flight").get<int>();
            f.earliest = require(fj, "earliest", "flight").get<double>();
            f.latest = require(fj, "latest", "flight").get<double>();
            f.service_duration = require(fj, "service_duration", "flight").get<double>();
            f.service_energy = fj.value("service_energy", 0.0);
            inst.flights.push_back(f);
        }
        for (const auto& oj : require(j, "operators", "scenario")) {
            Operator op;
            op.id = require(oj, "id", "operator").get<int>();
            op.depot_out = require(oj, "depot_out", "operator").get<int>();
            op.depot_in = require(oj, "depot_in", "operator").get<int>();
            op.fleet_size = require(oj, "fleet_size", "operator").get<int>();
            op.shared_count = oj.value("shared_count", 0);
            op.service_radius = oj.value("service_radius", 0.0);
            op.unit_delay_cost = require(oj, "unit_delay_cost", "operator").get<double>();
            if (oj.contains("priority"))
                for (const auto& [key, val] : oj.at("priority").items())
                    op.priority.emplace_back(std::stoi(key), val.get<int>());
            std::sort(op.priority.begin(), op.priority.end());
            inst.operators.push_back(op);
        }
        const auto& vp = require(j, "vehicle_params", "scenario");
        inst.vehicle_params.capacity = require(vp, "capacity", "vehicle_params").get<double>();
        inst.vehicle_params.speed = require(vp, "speed", "vehicle_params").get<double>();
        inst.vehicle_params.consumption_rate =
            require(vp, "consumption_rate", "vehicle_params").get<double>();
        inst.vehicle_params.charge_rate = require(vp, "charge_rate", "vehicle_params").get<double>();
        inst.vehicle_params.min_soc_fraction =
            require(vp, "min_soc_fraction", "vehicle_params").get<double>();
        inst.vehicle_params.unit_energy_cost = vp.value("unit_energy_cost", 1.0);

        inst.graph.horizon = j.value("horizon", 0.0);
        inst.graph.big_m = j.value("big_m", 0.0);

        if (j.contains("distance_matrix")) {
            const auto& dm = j.at("distance_matrix");
            std::size_t n = inst.graph.nodes.size();
            if (dm.size() != n) throw ScenarioError("distance_matrix: wrong row count");
            inst.graph.distance = SquareMatrix(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (dm[i].size() != n) throw ScenarioError("distance_matrix: wrong column count");
                for (std::size_t k = 0; k < n; ++k) inst.graph.distance.at(i, k) = dm[i][k].get<double>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(std::string("scenario parse error: ") + e.what());
    }
    inst.finalize();
    return inst;
}

inline nlohmann::ordered_json instance_to_json(const Instance& inst) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["mode"] = to_string(inst.mode);
    j["horizon"] = inst.graph.horizon;
    j["big_m"] = inst.graph.big_m;
    auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
    for (const Node& n : inst.graph.nodes)
        nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}, {"x", n.x}, {"y", n.y}});
    auto& flights = j["flights"] = nlohmann::ordered_json::array();
    for (const Flight& f : inst.flights)
        flights.push_back({{"node", f.node},
                           {"owner", f.owner},
                           {"earliest", f.earliest},
                           {"latest", f.latest},
                           {"service_duration", f.service_duration},
                           {"service_energy", f.service_energy}});
    auto& ops = j["operators"] = nlohmann::ordered_json::array();
    for (const Operator& op : inst.operators) {
        nlohmann::ordered_json oj{{"id", op.id},
                                  {"depot_out", op.depot_out},
                                  {"depot_in", op.depot_in},
                                  {"fleet_size", op.fleet_size},
                                  {"shared_count", op.shared_count},
                                  {"service_radius", op.service_radius},
                                  {"unit_delay_cost", op.unit_delay_cost}};
        nlohmann::ordered_json pj = nlohmann::ordered_json::object();
        for (const auto& [node, p] : op.priority) pj[std::to_string(node)] = p;
        oj["priority"] = pj;
        ops.push_back(oj);
    }
    j["vehicle_params"] = {{"capacity", inst.vehicle_params.capacity},
                           {"speed", inst.vehicle_params.speed},
                           {"consumption_rate", inst.vehicle_params.consumption_rate},
                           {"charge_rate", inst.vehicle_params.charge_rate},
                           {"min_soc_fraction", inst.vehicle_params.min_soc_fraction},
                           {"unit_energy_cost", inst.vehicle_params.unit_energy_cost}};
    return j;
}

inline Instance load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError("scenario parse error in " + path + ": " + e.what());
    }
    return instance_from_json(j);
}

inline void save_scenario(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write scenario file: " + path);
    out << instance_to_json(inst).dump(2) << "\n";
}

}  // namespace towsched
