#pragma once

// Shared fixture builders for the test suites.

#include <vector>

#include "towsched/generator.hpp"
#include "towsched/instance.hpp"

namespace th {

using namespace towsched;

struct FlightSpec {
    double x, y, earliest, latest;
    int owner = 0;
    double service = 3.0;
    double energy = 0.0;
};

struct OpSpec {
    double x, y;
    int fleet = 1;
    int shared = 0;
    double radius = 0.0;
    double delay_cost = 1.0;
};

// Hand-built instance: depots per operator (out/in co-located), flight stands
// and chargers at explicit coordinates. Node ids: depots first (out, in per
// operator), then chargers, then flights.
inline Instance build(std::vector<OpSpec> ops, std::vector<FlightSpec> flights,
                      std::vector<std::pair<double, double>> chargers = {},
                      Mode mode = Mode::Cooperated, VehicleParams vp = {50, 10, 0.5, 0.8, 0.3, 1.0},
                      double horizon = 0.0) {
    Instance inst;
    inst.mode = mode;
    inst.vehicle_params = vp;
    int id = 0;
    for (std::size_t r = 0; r < ops.size(); ++r) {
        inst.graph.nodes.push_back({id++, NodeKind::DepotOut, ops[r].x, ops[r].y});
        inst.graph.nodes.push_back({id++, NodeKind::DepotIn, ops[r].x, ops[r].y});
    }
    for (auto [x, y] : chargers) inst.graph.nodes.push_back({id++, NodeKind::Charger, x, y});
    for (const auto& f : flights) {
        inst.graph.nodes.push_back({id, NodeKind::Flight, f.x, f.y});
        inst.flights.push_back({id, f.owner, f.earliest, f.latest, f.service, f.energy});
        ++id;
    }
    for (std::size_t r = 0; r < ops.size(); ++r) {
        Operator op;
        op.id = static_cast<int>(r);
        op.depot_out = static_cast<int>(2 * r);
        op.depot_in = static_cast<int>(2 * r + 1);
        op.fleet_size = ops[r].fleet;
        op.shared_count = ops[r].shared;
        op.service_radius = ops[r].radius;
        op.unit_delay_cost = ops[r].delay_cost;
        inst.operators.push_back(op);
    }
    inst.graph.horizon = horizon;
    inst.finalize();
    return inst;
}

inline void mark_priority(Instance& inst, int op, int flight_idx, int value) {
    inst.operators[op].priority.emplace_back(inst.flights[flight_idx].node, value);
    inst.finalize();
}

// Generator spec for oracle-sized instances (2 operators, 2-3 vehicles).
inline GenSpec tiny_spec(int flights, int vehicles, int chargers = 1) {
    GenSpec g = gen_profile("tiny");
    g.flights = flights;
    g.chargers = chargers;
    if (vehicles == 2) {
        g.fleet_sizes = {1, 1};
        g.shared_counts = {1, 1};
    } else {
        g.fleet_sizes = {2, 1};
        g.shared_counts = {2, 1};
    }
    return g;
}

}  // namespace th
