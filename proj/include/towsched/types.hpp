#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace towsched {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;

// Scenario file is malformed or violates a model invariant.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A required schedule/solve does not exist (unserviceable flight, empty
// feasible set under a delay bound, unreachable charger, ...).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input exceeds a hard size guard (e.g. exact solver limits).
struct GuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class NodeKind { Flight, DepotOut, DepotIn, Charger };

enum class Mode { Separated, Cooperated };

inline std::string to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Flight: return "flight";
        case NodeKind::DepotOut: return "depot_out";
        case NodeKind::DepotIn: return "depot_in";
        case NodeKind::Charger: return "charging";
    }
    return "?";
}

inline std::string to_string(Mode m) {
    return m == Mode::Separated ? "separated" : "cooperated";
}

struct Node {
    int id = 0;  // external id, unique within the scenario
    NodeKind kind = NodeKind::Flight;
    double x = 0.0;  // meters
    double y = 0.0;  // meters
};

struct Flight {
    int node = 0;      // node id of the aircraft stand
    int owner = 0;     // original operator id
    double earliest = 0.0;          // minutes
    double latest = 0.0;            // minutes
    double service_duration = 0.0;  // minutes
    double service_energy = 0.0;    // kWh per towing service
};

struct Operator {
    int id = 0;
    int depot_out = 0;
    int depot_in = 0;
    int fleet_size = 0;
    int shared_count = 0;         // vehicles contributed to the coalition
    double service_radius = 0.0;  // meters, around depot_out
    double unit_delay_cost = 0.0; // currency per minute per flight
    // flight node id -> 0/1 priority; absent means 0
    std::vector<std::pair<int, int>> priority;
};

struct VehicleParams {
    double capacity = 50.0;          // kWh
    double speed = 10.0;             // km/h
    double consumption_rate = 0.5;   // kWh per km
    double charge_rate = 0.8;        // kWh per minute
    double min_soc_fraction = 0.3;   // usable floor as a fraction of capacity
    double unit_energy_cost = 1.0;   // currency per meter traveled

    double min_soc() const { return capacity * min_soc_fraction; }
    // minutes per meter at constant speed
    double minutes_per_meter() const { return 60.0 / (speed * 1000.0); }
    // kWh per meter; consumption is linear in distance
    double kwh_per_meter() const { return consumption_rate / 1000.0; }
};

class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    double& at(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    std::size_t size() const { return n_; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct Graph {
    std::vector<Node> nodes;
    SquareMatrix distance;     // meters
    SquareMatrix travel_time;  // minutes, d / v
    SquareMatrix energy;       // kWh, d * consumption rate
    double horizon = 0.0;      // minutes
    double big_m = 0.0;        // deactivation constant for untraversed arcs

    std::size_t size() const { return nodes.size(); }
};

}  // namespace towsched
