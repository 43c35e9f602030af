#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>

#include "helpers.hpp"
#include "towsched/generator.hpp"
#include "towsched/instance.hpp"

using namespace towsched;

namespace {

// independent interval-intersection check used as the overlap oracle
bool intervals_touch(double a0, double a1, double b0, double b1) {
    double lo = std::max(a0, b0), hi = std::min(a1, b1);
    return lo <= hi;
}

std::set<int> as_set(const std::vector<char>& mask, const Instance& inst) {
    std::set<int> out;
    for (std::size_t f = 0; f < mask.size(); ++f)
        if (mask[f]) out.insert(inst.flights[f].node);
    return out;
}

}  // namespace

TEST_CASE("minimal scenario round-trips through JSON") {
    Instance inst = th::build({{0, 0, 1, 0, 0, 1}}, {{100, 100, 10, 20, 0}});
    REQUIRE(inst.num_flights() == 1);
    REQUIRE(inst.num_vehicles() == 1);
    REQUIRE(inst.num_operators() == 1);

    auto tmp = std::filesystem::temp_directory_path() / "towsched_min_scenario.json";
    save_scenario(inst, tmp.string());
    Instance loaded = load_scenario(tmp.string());
    CHECK(loaded.num_flights() == 1);
    CHECK(loaded.num_vehicles() == 1);
    CHECK(loaded.graph.distance.at(0, 2) ==
          Catch::Approx(std::sqrt(100.0 * 100.0 + 100.0 * 100.0)));
    std::filesystem::remove(tmp);
}

TEST_CASE("latest < earliest is rejected with the flight named") {
    REQUIRE_THROWS_MATCHES(th::build({{0, 0, 1}}, {{100, 100, 25, 20, 0}}), ScenarioError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("flights[0]") &&
                               Catch::Matchers::ContainsSubstring("earliest")));
}

TEST_CASE("dangling references are rejected") {
    Instance inst = th::build({{0, 0, 1}}, {{100, 100, 10, 20, 0}});
    auto j = instance_to_json(inst);
    j["flights"][0]["node"] = 999;
    REQUIRE_THROWS_AS(instance_from_json(j), ScenarioError);
}

TEST_CASE("A-like generator output matches the reference shape") {
    Instance inst = generate_scenario(gen_profile("A-like"), 7);
    CHECK(inst.num_flights() == 56);
    CHECK(inst.num_operators() == 3);
    CHECK(inst.num_vehicles() == 12);
    CHECK(inst.mode == Mode::Cooperated);
    // Table-sheet vehicle data
    CHECK(inst.vehicle_params.capacity == 50.0);
    CHECK(inst.vehicle_params.consumption_rate == 0.5);
    CHECK(inst.vehicle_params.charge_rate == 0.8);
    CHECK(inst.vehicle_params.min_soc_fraction == 0.3);
    CHECK(inst.operators[2].unit_delay_cost == 4.0);
}

TEST_CASE("energy matrix is distance times consumption") {
    Instance inst = th::build({{0, 0, 1}}, {{1000, 0, 10, 20, 0}});
    // 1000 m at 0.5 kWh/km -> 0.5 kWh
    CHECK(inst.graph.energy.at(0, 2) == Catch::Approx(0.5));
    // travel time: 1 km at 10 km/h -> 6 minutes
    CHECK(inst.graph.travel_time.at(0, 2) == Catch::Approx(6.0));
}

TEST_CASE("serviceable set: radius zero and own-only priorities") {
    // operator 0 owns both flights, operator 1 owns none and shares nothing
    Instance inst = th::build({{0, 0, 1, 1, 0}, {5000, 0, 1, 1, 0}},
                              {{100, 0, 0, 10, 0}, {200, 0, 0, 10, 0}});
    auto s0 = serviceable_set(inst.operators[0], inst);
    auto s1 = serviceable_set(inst.operators[1], inst);
    CHECK(as_set(s0, inst) == std::set<int>{inst.flights[0].node, inst.flights[1].node});
    CHECK(as_set(s1, inst).empty());
}

TEST_CASE("serviceable set: radius covering the whole apron takes all flights") {
    Instance inst = th::build({{0, 0, 1, 1, 0}, {5000, 0, 1, 1, 1e7}},
                              {{100, 0, 0, 10, 0}, {200, 0, 0, 10, 0}});
    auto s1 = serviceable_set(inst.operators[1], inst);
    CHECK(as_set(s1, inst) == std::set<int>{inst.flights[0].node, inst.flights[1].node});
}

TEST_CASE("serviceable set: radius keeps exactly the close flights") {
    // distances from operator 1's depot: 500, 1600, 1400; all owned by op 0
    Instance inst = th::build({{0, 5000, 1, 1, 0}, {0, 0, 1, 1, 1500}},
                              {{500, 0, 0, 10, 0}, {1600, 0, 0, 10, 0}, {1400, 0, 0, 10, 0}});
    auto s1 = serviceable_set(inst.operators[1], inst);
    CHECK(as_set(s1, inst) == std::set<int>{inst.flights[0].node, inst.flights[2].node});
}

TEST_CASE("virtual split: fully shared operator yields a single shared fleet") {
    Instance inst = th::build({{0, 0, 4, 4, 1000}}, {{100, 0, 0, 10, 0}});
    REQUIRE(inst.fleets.size() == 1);
    CHECK(inst.fleets[0].kind == FleetKind::Shared);
    CHECK(inst.fleets[0].vehicle_ids.size() == 4);
}

TEST_CASE("virtual split: zero shared vehicles leaves one non-shared fleet") {
    Instance inst = th::build({{0, 0, 3, 0, 0}}, {{100, 0, 0, 10, 0}});
    REQUIRE(inst.fleets.size() == 1);
    CHECK(inst.fleets[0].kind == FleetKind::NonShared);
    CHECK(inst.fleets[0].vehicle_ids.size() == 3);
}

TEST_CASE("virtual split: partition of vehicle ids") {
    Instance inst = th::build({{0, 0, 3, 1, 500}, {3000, 0, 2, 2, 0}},
                              {{100, 0, 0, 10, 0}, {3100, 0, 0, 10, 1}});
    // op 0: fleets of sizes 2 and 1; op 1: single shared fleet of 2
    std::set<int> seen;
    int total = 0;
    for (const auto& fl : inst.fleets) {
        for (int v : fl.vehicle_ids) {
            CHECK(!seen.count(v));
            seen.insert(v);
            ++total;
        }
        CHECK(fl.vehicle_ids.size() > 0);
    }
    CHECK(total == 5);
    CHECK(inst.fleets[0].vehicle_ids.size() == 2);
    CHECK(inst.fleets[0].kind == FleetKind::NonShared);
    CHECK(inst.fleets[1].vehicle_ids.size() == 1);
    CHECK(inst.fleets[1].kind == FleetKind::Shared);
    for (int v = 0; v < inst.num_vehicles(); ++v) CHECK(inst.vehicle_fleet[v] >= 0);
}

TEST_CASE("overlap flags: boundary touch counts, disjoint does not") {
    std::vector<Flight> fl{{0, 0, 10, 20, 3, 0}, {1, 0, 20, 30, 3, 0}, {2, 0, 21, 30, 3, 0}};
    auto q = overlap_flags(fl);
    CHECK(q[0][1] == 1);  // shared endpoint 20
    CHECK(q[0][2] == 0);  // [10,20] vs [21,30]
    CHECK(q[0][0] == 0);  // zero diagonal
}

TEST_CASE("overlap flags: all-pairs on four windows match brute force") {
    std::vector<Flight> fl{
        {0, 0, 0, 5, 3, 0}, {1, 0, 3, 8, 3, 0}, {2, 0, 9, 12, 3, 0}, {3, 0, 5, 9, 3, 0}};
    auto q = overlap_flags(fl);
    CHECK(q[0][1] == 1);
    CHECK(q[0][3] == 1);
    CHECK(q[1][2] == 0);
    CHECK(q[2][3] == 1);
    for (std::size_t i = 0; i < fl.size(); ++i)
        for (std::size_t j = 0; j < fl.size(); ++j) {
            bool expect = i != j && intervals_touch(fl[i].earliest, fl[i].latest, fl[j].earliest,
                                                    fl[j].latest);
            CHECK(static_cast<bool>(q[i][j]) == expect);
            CHECK(q[i][j] == q[j][i]);
        }
}

TEST_CASE("serviceable set grows monotonically with the radius") {
    GenSpec spec = th::tiny_spec(6, 3);
    Instance base = generate_scenario(spec, 3);
    std::vector<char> prev(base.num_flights(), 0);
    for (double radius : {0.0, 500.0, 1000.0, 2000.0, 4000.0}) {
        Instance inst = base;
        inst.operators[0].service_radius = radius;
        inst.finalize();
        auto s = serviceable_set(inst.operators[0], inst);
        for (int f = 0; f < inst.num_flights(); ++f) {
            if (prev[f]) CHECK(s[f]);  // superset of the smaller radius
        }
        prev = s;
    }
}

TEST_CASE("zero sharing parameters reduce cooperated structure to separated") {
    GenSpec spec = th::tiny_spec(6, 3);
    spec.service_radius = {0, 0};
    spec.shared_counts = {0, 0};
    Instance coop = generate_scenario(spec, 11);
    Instance sep = coop;
    sep.mode = Mode::Separated;
    sep.finalize();
    REQUIRE(coop.fleets.size() == sep.fleets.size());
    for (std::size_t i = 0; i < coop.fleets.size(); ++i) {
        CHECK(coop.fleets[i].owner == sep.fleets[i].owner);
        CHECK(coop.fleets[i].vehicle_ids == sep.fleets[i].vehicle_ids);
        CHECK(coop.fleets[i].serviceable == sep.fleets[i].serviceable);
    }
}

TEST_CASE("generated scenarios are deterministic per seed") {
    GenSpec spec = th::tiny_spec(5, 2);
    auto a = instance_to_json(generate_scenario(spec, 42)).dump();
    auto b = instance_to_json(generate_scenario(spec, 42)).dump();
    auto c = instance_to_json(generate_scenario(spec, 43)).dump();
    CHECK(a == b);
    CHECK(a != c);
}
