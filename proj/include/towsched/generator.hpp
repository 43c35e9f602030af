#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "towsched/instance.hpp"
#include "towsched/rng.hpp"

namespace towsched {

// Knobs for the synthetic apron builder. Named profiles fill these with the
// reference configuration (three operators, fleets of four, 1.5 km radius,
// full sharing, delay costs 8/8/4, the standard tractor data sheet); the
// flight counts follow the three demand scales (56 / 148 / 758).
struct GenSpec {
    int flights = 56;
    int operators = 3;
    std::vector<int> fleet_sizes{4, 4, 4};
    std::vector<int> shared_counts{4, 4, 4};
    std::vector<double> service_radius{1500, 1500, 1500};
    std::vector<double> unit_delay_cost{8, 8, 4};
    std::vector<double> owner_weights{382, 182, 194};  // demand split across operators
    double span = 60;            // minutes over which windows open
    double window_width = 15;    // latest - earliest
    double horizon_pad = 240;    // slack after the last window
    double apron_width = 3000;   // meters
    double apron_height = 1200;
    int chargers = 3;
    double priority_std = 0.1;   // target std dev of own-flight priorities
    double service_energy = 2.0;  // kWh per towing service
    double service_duration = 3;  // minutes
    VehicleParams vehicle_params{50, 10, 0.5, 0.8, 0.3, 1.0};
    Mode mode = Mode::Cooperated;
};

inline GenSpec gen_profile(const std::string& name) {
    GenSpec g;
    if (name == "A-like") {
        g.flights = 56;
    } else if (name == "B-like") {
        g.flights = 148;
        g.span = 180;
    } else if (name == "C-like") {
        g.flights = 758;
        g.span = 1440;
    } else if (name == "tiny") {
        g.flights = 6;
        g.operators = 2;
        g.fleet_sizes = {2, 1};
        g.shared_counts = {2, 1};
        g.service_radius = {4000, 4000};
        g.unit_delay_cost = {8, 4};
        g.owner_weights = {2, 1};
        g.span = 45;
        g.apron_width = 2000;
        g.apron_height = 800;
        g.chargers = 1;
        g.priority_std = 0.0;
    } else if (name == "custom") {
        // caller adjusts fields
    } else {
        throw ScenarioError("unknown generator profile: " + name);
    }
    return g;
}

// Deterministic synthetic scenario: stands scattered over a rectangular
// apron, depots along the south edge (outbound and inbound co-located),
// chargers through the middle, windows drawn inside the span. The real
// network behind the reference scenarios is not public; this apron is an
// approximation with the same controls.
inline Instance generate_scenario(const GenSpec& spec, std::uint64_t seed) {
    if (static_cast<int>(spec.fleet_sizes.size()) != spec.operators ||
        static_cast<int>(spec.shared_counts.size()) != spec.operators ||
        static_cast<int>(spec.service_radius.size()) != spec.operators ||
        static_cast<int>(spec.unit_delay_cost.size()) != spec.operators ||
        static_cast<int>(spec.owner_weights.size()) != spec.operators)
        throw ScenarioError("generator spec: per-operator lists must match the operator count");

    Rng rng(seed);
    Instance inst;
    inst.mode = spec.mode;
    inst.vehicle_params = spec.vehicle_params;

    int next_id = 0;
    // depots first: out/in pairs per operator, same position
    std::vector<std::pair<int, int>> depot_ids;
    for (int r = 0; r < spec.operators; ++r) {
        double x = spec.apron_width * (r + 1) / (spec.operators + 1);
        double y = -150.0;
        int out_id = next_id++;
        int in_id = next_id++;
        inst.graph.nodes.push_back({out_id, NodeKind::DepotOut, x, y});
        inst.graph.nodes.push_back({in_id, NodeKind::DepotIn, x, y});
        depot_ids.emplace_back(out_id, in_id);
    }
    for (int e = 0; e < spec.chargers; ++e) {
        double x = spec.apron_width * (e + 1) / (spec.chargers + 1);
        inst.graph.nodes.push_back({next_id++, NodeKind::Charger, x, spec.apron_height * 0.5});
    }

    // owners get exact counts proportional to the demand weights
    double weight_total = 0.0;
    for (double w : spec.owner_weights) weight_total += w;
    std::vector<int> counts(spec.operators, 0);
    int assigned = 0;
    for (int r = 0; r < spec.operators; ++r) {
        counts[r] = static_cast<int>(std::floor(spec.flights * spec.owner_weights[r] / weight_total));
        assigned += counts[r];
    }
    for (int r = 0; assigned < spec.flights; r = (r + 1) % spec.operators, ++assigned) ++counts[r];
    std::vector<int> owners;
    for (int r = 0; r < spec.operators; ++r) owners.insert(owners.end(), counts[r], r);
    for (int i = static_cast<int>(owners.size()) - 1; i > 0; --i)
        std::swap(owners[i], owners[rng.below(i + 1)]);

    for (int f = 0; f < spec.flights; ++f) {
        int id = next_id++;
        double x = rng.uniform01() * spec.apron_width;
        double y = rng.uniform01() * spec.apron_height;
        inst.graph.nodes.push_back({id, NodeKind::Flight, x, y});
        Flight fl;
        fl.node = id;
        fl.owner = owners[f];
        fl.earliest = std::floor(rng.uniform01() * spec.span);
        fl.latest = fl.earliest + spec.window_width;
        fl.service_duration = spec.service_duration;
        fl.service_energy = spec.service_energy;
        inst.flights.push_back(fl);
    }

    for (int r = 0; r < spec.operators; ++r) {
        Operator op;
        op.id = r;
        op.depot_out = depot_ids[r].first;
        op.depot_in = depot_ids[r].second;
        op.fleet_size = spec.fleet_sizes[r];
        op.shared_count = spec.shared_counts[r];
        op.service_radius = spec.service_radius[r];
        op.unit_delay_cost = spec.unit_delay_cost[r];
        inst.operators.push_back(op);
    }

    // priority-1 marks on own flights only, sized so the per-operator std dev
    // of the binary marks approximates the target: std = sqrt(m(1-m))
    if (spec.priority_std > 0.0) {
        double s2 = spec.priority_std * spec.priority_std;
        double m = (1.0 - std::sqrt(std::max(0.0, 1.0 - 4.0 * s2))) / 2.0;
        for (int r = 0; r < spec.operators; ++r) {
            std::vector<int> own;
            for (int f = 0; f < spec.flights; ++f)
                if (inst.flights[f].owner == r) own.push_back(f);
            int marks = static_cast<int>(std::lround(m * own.size()));
            for (int i = static_cast<int>(own.size()) - 1; i > 0; --i)
                std::swap(own[i], own[rng.below(i + 1)]);
            std::vector<int> chosen(own.begin(), own.begin() + std::min<int>(marks, own.size()));
            std::sort(chosen.begin(), chosen.end());
            for (int f : chosen) inst.operators[r].priority.emplace_back(inst.flights[f].node, 1);
        }
    }

    inst.graph.horizon = spec.span + spec.window_width + spec.horizon_pad;
    inst.graph.big_m = inst.graph.horizon;
    inst.finalize();
    return inst;
}

}  // namespace towsched
