#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "towsched/coadh.hpp"
#include "towsched/generator.hpp"

using namespace towsched;

namespace {

Solution seeded_solution(const Instance& inst) {
    Solution sol = initial_solution(inst, EvalParams{});
    sol.violations = priority_violations(sol, inst);
    return sol;
}

// Two operators sharing everything, explicit distances chosen so flight X has
// empty-route insertion costs (4, 9) and flight Y (5, 6).
Instance regret_fixture() {
    Instance inst;
    inst.mode = Mode::Cooperated;
    inst.vehicle_params = {50, 10, 0.5, 0.8, 0.3, 1.0};
    inst.graph.nodes = {{0, NodeKind::DepotOut, 0, 0}, {1, NodeKind::DepotIn, 0, 0},
                        {2, NodeKind::DepotOut, 0, 0}, {3, NodeKind::DepotIn, 0, 0},
                        {4, NodeKind::Flight, 0, 0},   {5, NodeKind::Flight, 0, 0}};
    inst.flights = {{4, 0, 0, 500, 3, 0}, {5, 0, 0, 500, 3, 0}};
    inst.operators = {{0, 0, 1, 1, 1, 1000, 1.0, {}}, {1, 2, 3, 1, 1, 1000, 1.0, {}}};
    SquareMatrix d(6, 50.0);
    auto set = [&](int i, int j, double v) { d.at(i, j) = d.at(j, i) = v; };
    for (int i = 0; i < 6; ++i) d.at(i, i) = 0;
    set(0, 1, 0);
    set(2, 3, 0);
    set(0, 4, 2);
    set(1, 4, 2);
    set(2, 4, 4.5);
    set(3, 4, 4.5);
    set(0, 5, 2.5);
    set(1, 5, 2.5);
    set(2, 5, 3);
    set(3, 5, 3);
    set(4, 5, 100);  // sharing one vehicle is never attractive
    inst.graph.distance = d;
    inst.graph.horizon = 600;
    inst.finalize();
    return inst;
}

}  // namespace

TEST_CASE("weighted index: equal scores draw uniformly") {
    Rng rng(17);
    std::vector<double> scores{50, 50, 50};
    int counts[3] = {0, 0, 0};
    const int N = 30000;
    for (int i = 0; i < N; ++i) ++counts[weighted_index(scores, rng)];
    for (int c : counts) CHECK(std::abs(c / double(N) - 1.0 / 3.0) < 0.01);
}

TEST_CASE("weighted index: 90/10 scores follow the score ratio") {
    Rng rng(18);
    std::vector<double> scores{90, 10};
    int first = 0;
    const int N = 100000;
    for (int i = 0; i < N; ++i)
        if (weighted_index(scores, rng) == 0) ++first;
    CHECK(std::abs(first / double(N) - 0.9) < 0.01);
}

TEST_CASE("weighted index: single entry is always chosen") {
    Rng rng(19);
    std::vector<double> scores{50};
    for (int i = 0; i < 10; ++i) CHECK(weighted_index(scores, rng) == 0);
}

TEST_CASE("score updates add the outcome weight to all three banks") {
    SearchConfig cfg;
    OperatorBank bank = OperatorBank::initial(cfg);
    update_scores(bank, 1, 2, 0, Outcome::NewBest, cfg);
    CHECK(bank.destroy_scores[1] == 80);
    CHECK(bank.repair_scores[2] == 80);
    CHECK(bank.count_scores[0] == 80);
    update_scores(bank, 1, 2, 0, Outcome::Accepted, cfg);
    CHECK(bank.destroy_scores[1] == 98);  // 50 + 30 + 18
    OperatorBank fresh = OperatorBank::initial(cfg);
    update_scores(fresh, 0, 0, 0, Outcome::Rejected, cfg);
    CHECK(fresh.destroy_scores[0] == 62);
}

TEST_CASE("initial solution: one flight lands on the only vehicle") {
    Instance inst = th::build({{0, 0, 1}}, {{500, 0, 5, 20, 0}});
    Solution sol = seeded_solution(inst);
    REQUIRE(sol.routes[0] == std::vector<int>{0});
    CHECK(sol.complete());
}

TEST_CASE("initial solution: non-overlapping flights stack in time order") {
    Instance inst = th::build({{0, 0, 1}}, {{500, 0, 30, 40, 0}, {600, 0, 5, 15, 0}});
    Solution sol = seeded_solution(inst);
    REQUIRE(sol.routes[0] == std::vector<int>{1, 0});  // earliest first
}

TEST_CASE("initial solution: unserviceable flight raises infeasible") {
    Instance inst = th::build({{0, 0, 0, 0, 0}, {5000, 0, 1, 0, 0}},
                              {{100, 0, 5, 20, 0}});  // owner 0 has no vehicles
    CHECK_THROWS_AS(initial_solution(inst, EvalParams{}), InfeasibleError);
}

TEST_CASE("random destroy: n = 0 leaves the solution alone, n = all empties it") {
    Instance inst = generate_scenario(th::tiny_spec(6, 3), 5);
    Solution sol = seeded_solution(inst);
    Rng rng(1);
    Solution copy = sol;
    auto removed = destroy_random(copy, inst, 0, rng);
    CHECK(removed.empty());
    CHECK(copy.routes == sol.routes);
    removed = destroy_random(copy, inst, 6, rng);
    CHECK(removed.size() == 6);
    for (const auto& r : copy.routes) CHECK(r.empty());
}

TEST_CASE("random destroy removes uniformly across flights") {
    Instance inst = generate_scenario(th::tiny_spec(6, 3), 5);
    Solution sol = seeded_solution(inst);
    std::vector<int> hits(6, 0);
    const int N = 6000;
    Rng rng(2);
    for (int i = 0; i < N; ++i) {
        Solution copy = sol;
        for (int f : destroy_random(copy, inst, 2, rng)) ++hits[f];
    }
    // chi-square against uniform 2/6 per trial: 5 dof, 0.1% critical ~ 20.5
    double expect = N * 2.0 / 6.0;
    double chi2 = 0.0;
    for (int h : hits) chi2 += (h - expect) * (h - expect) / expect;
    CHECK(chi2 < 20.5);
}

TEST_CASE("worst removal rank bias") {
    CHECK(detail::biased_rank(3, 0.9, 6) == 1);   // floor(3 * 0.9^6) = 1
    CHECK(detail::biased_rank(3, 0.999, 1e6) == 0);  // extreme bias keeps the top
    CHECK(detail::biased_rank(5, 0.0, 6) == 0);
    CHECK(detail::biased_rank(5, 0.9999999, 1) == 4);  // never past the end
}

TEST_CASE("worst removal with extreme bias takes the largest gain") {
    Instance inst = generate_scenario(th::tiny_spec(6, 3), 9);
    Solution sol = seeded_solution(inst);
    double best_gain = -kInfinity;
    int best_f = -1;
    for (int f = 0; f < inst.num_flights(); ++f) {
        double g = detail::removal_gain(sol, inst, EvalParams{}, f, detail::GainKind::Evaluate);
        if (g > best_gain + 1e-12) {
            best_gain = g;
            best_f = f;
        }
    }
    Rng rng(3);
    auto removed = destroy_worst(sol, inst, EvalParams{}, 1, detail::GainKind::Evaluate, 1e9, rng);
    REQUIRE(removed.size() == 1);
    CHECK(removed[0] == best_f);
}

TEST_CASE("travel-only and full gains rank identically when no penalties bite") {
    Instance inst = generate_scenario(th::tiny_spec(6, 3), 12);
    Solution sol = seeded_solution(inst);
    EvalParams ep;  // unbounded delay, no violations in this instance
    REQUIRE(sol.violations == 0);
    for (int f = 0; f < inst.num_flights(); ++f)
        CHECK(detail::removal_gain(sol, inst, ep, f, detail::GainKind::Evaluate) ==
              Catch::Approx(detail::removal_gain(sol, inst, ep, f, detail::GainKind::TravelOnly)));
    Solution a = sol, b = sol;
    Rng ra(4), rb(4);
    auto fa = destroy_worst(a, inst, ep, 3, detail::GainKind::Evaluate, 6, ra);
    auto fb = destroy_worst(b, inst, ep, 3, detail::GainKind::TravelOnly, 6, rb);
    CHECK(fa == fb);
}

TEST_CASE("shaw removal pulls twins out together") {
    // flights 0 and 1 share a stand position and window; flight 2 is far off
    Instance inst = th::build({{0, 0, 2, 2, 10000}},
                              {{500, 0, 10, 20, 0}, {500, 0, 10, 20, 0}, {4000, 0, 50, 60, 0}});
    SearchConfig cfg;
    cfg.chi_shaw = 1;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Solution sol = seeded_solution(inst);
        Rng rng(seed);
        auto removed = destroy_shaw(sol, inst, cfg, 2, rng);
        REQUIRE(removed.size() == 2);
        if (removed[0] == 0) CHECK(removed[1] == 1);
        if (removed[0] == 1) CHECK(removed[1] == 0);
    }
}

TEST_CASE("shaw relatedness honors the weight knobs") {
    Instance inst = th::build({{0, 0, 1}},
                              {{100, 0, 0, 10, 0}, {200, 0, 90, 100, 0}, {3000, 0, 0, 10, 0}});
    SearchConfig cfg;
    cfg.chi_d = 1.0;
    cfg.chi_e = 0.0;
    double max_d = 2900;  // between flights 0 and 2
    double span = 90;
    // with time weight off, the near-but-late flight 1 is more related than
    // the far-but-synchronized flight 2
    CHECK(shaw_relatedness(inst, cfg, 0, 1, max_d, span) <
          shaw_relatedness(inst, cfg, 0, 2, max_d, span));
    cfg.chi_d = 0.0;
    cfg.chi_e = 1.0;
    CHECK(shaw_relatedness(inst, cfg, 0, 2, max_d, span) <
          shaw_relatedness(inst, cfg, 0, 1, max_d, span));
}

TEST_CASE("shaw removal with rank one always removes the most related candidate") {
    Instance inst = th::build({{0, 0, 3, 3, 10000}},
                              {{500, 0, 0, 10, 0}, {900, 0, 5, 15, 0}, {2500, 0, 30, 40, 0},
                               {3900, 0, 80, 90, 0}});
    SearchConfig cfg;
    cfg.chi_shaw = 1;
    double max_d = 3400, e_lo = 0, e_hi = 80;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Solution sol = seeded_solution(inst);
        Rng rng(seed);
        auto removed = destroy_shaw(sol, inst, cfg, 2, rng);
        REQUIRE(removed.size() == 2);
        double best = kInfinity;
        int expect = -1;
        for (int f = 0; f < inst.num_flights(); ++f) {
            if (f == removed[0]) continue;
            double rel = shaw_relatedness(inst, cfg, removed[0], f, max_d, e_hi - e_lo);
            if (rel < best - 1e-12) {
                best = rel;
                expect = f;
            }
        }
        CHECK(removed[1] == expect);
    }
}

TEST_CASE("delay chain removal attacks the head of the longest chain") {
    // one vehicle, five flights in a row; the last three windows close before
    // the vehicle can reach them
    Instance inst = th::build({{0, 0, 1}},
                              {{1000, 0, 0, 8, 0},
                               {2000, 0, 0, 15, 0},
                               {3000, 0, 0, 20, 0},
                               {4000, 0, 0, 24, 0},
                               {5000, 0, 0, 28, 0}},
                              {}, Mode::Separated);
    Solution sol = Solution::empty(inst);
    for (int f = 0; f < 5; ++f) commit_insertion(sol, inst, 0, f, f);
    // arrivals: 6, 15, 24, 33, 42 -> delays on flights 2, 3, 4
    REQUIRE(sol.flight_delays[1] == 0.0);
    REQUIRE(sol.flight_delays[2] > 0.0);
    REQUIRE(sol.flight_delays[3] > 0.0);
    REQUIRE(sol.flight_delays[4] > 0.0);
    Rng rng(5);
    Solution copy = sol;
    auto removed = destroy_delay_chain(copy, inst, EvalParams{}, 1, 6, rng);
    REQUIRE(removed.size() == 1);
    CHECK(removed[0] == 2);  // first flight of the 2-3-4 chain
}

TEST_CASE("delay chain removal prefers the longer chain across vehicles") {
    Instance inst = th::build({{0, 0, 2, 0, 0}},
                              {{1000, 0, 0, 5, 0},
                               {2000, 0, 0, 10, 0},
                               {3000, 0, 0, 15, 0},
                               {1000, 0, 0, 5, 0},
                               {2000, 0, 0, 10, 0}},
                              {}, Mode::Separated);
    Solution sol = Solution::empty(inst);
    for (int f = 0; f < 3; ++f) commit_insertion(sol, inst, 0, f, f);       // chain of 3
    for (int f = 3; f < 5; ++f) commit_insertion(sol, inst, 1, f - 3, f);   // chain of 2
    for (int f = 0; f < 5; ++f) REQUIRE(sol.flight_delays[f] > 0.0);
    Rng rng(6);
    auto removed = destroy_delay_chain(sol, inst, EvalParams{}, 1, 6, rng);
    REQUIRE(removed.size() == 1);
    CHECK(removed[0] == 0);  // head of the length-3 chain on vehicle 0
}

TEST_CASE("delay chain removal falls back to delay-based removal without chains") {
    Instance inst = generate_scenario(th::tiny_spec(6, 3), 21);
    Solution sol = seeded_solution(inst);
    REQUIRE(sol.total_delay == 0.0);
    Rng rng(7);
    auto removed = destroy_delay_chain(sol, inst, EvalParams{}, 3, 6, rng);
    CHECK(removed.size() == 3);  // still removes the requested count
}

TEST_CASE("priority destroy signals when no qualifying pair exists") {
    Instance inst = generate_scenario(th::tiny_spec(6, 3), 23);  // no priority marks
    Solution sol = seeded_solution(inst);
    Rng rng(8);
    CHECK_FALSE(destroy_priority(sol, inst, 2, rng).has_value());
}

namespace {

// op 0 serves a foreign priority-0 flight while its overlapping own flight,
// marked priority 1 for op 0... the qualifying shape: i served by r with
// p_ir = 0, j marked p_jr = 1 but served elsewhere, windows overlapping.
Instance priority_fixture() {
    Instance inst = th::build({{0, 0, 1, 1, 10000, 1}, {4000, 0, 1, 1, 10000, 1}},
                              {{1000, 0, 10, 30, 0},    // flight 0, owner 0
                               {3000, 0, 12, 28, 0}},   // flight 1, owner 1
                              {}, Mode::Cooperated);
    // operator 1 prioritizes its own flight 1
    inst.operators[1].priority.emplace_back(inst.flights[1].node, 1);
    inst.finalize();
    return inst;
}

}  // namespace

TEST_CASE("priority destroy removes one qualifying pair as two nodes") {
    Instance inst = priority_fixture();
    Solution sol = Solution::empty(inst);
    commit_insertion(sol, inst, 1, 0, 0);  // operator 1 takes foreign flight 0 (p = 0)
    commit_insertion(sol, inst, 0, 0, 1);  // operator 0 takes flight 1 (p1 for op 1)
    sol.violations = priority_violations(sol, inst);
    REQUIRE(sol.violations == 1);
    Rng rng(9);
    auto pairs = destroy_priority(sol, inst, 2, rng);
    REQUIRE(pairs.has_value());
    REQUIRE(pairs->size() == 1);
    CHECK((*pairs)[0].flight_i == 0);
    CHECK((*pairs)[0].flight_j == 1);
    CHECK(sol.assignment[0] == -1);
    CHECK(sol.assignment[1] == -1);
}

TEST_CASE("priority repair swaps the pair and clears the violation") {
    Instance inst = priority_fixture();
    Solution sol = Solution::empty(inst);
    commit_insertion(sol, inst, 1, 0, 0);
    commit_insertion(sol, inst, 0, 0, 1);
    sol.violations = priority_violations(sol, inst);
    Rng rng(10);
    auto pairs = destroy_priority(sol, inst, 2, rng);
    REQUIRE(pairs.has_value());
    REQUIRE(repair_priority(sol, inst, *pairs));
    CHECK(sol.complete());
    CHECK(sol.assignment[0] == 0);  // flights changed hands
    CHECK(sol.assignment[1] == 1);
    CHECK(priority_violations(sol, inst) == 0);
}

TEST_CASE("priority repair rejects a swap outside the serviceable set") {
    // three operators: B serves A's flight i at priority 0, B's own marked
    // flight j sits with C; the swap would push i into C's vehicle, but C's
    // radius only reaches j
    Instance inst = th::build({{0, 0, 1, 1, 10000, 1},     // A
                               {4000, 0, 1, 1, 10000, 1},  // B
                               {8000, 0, 1, 1, 600, 1}},   // C, short reach
                              {{1000, 0, 10, 30, 0},       // flight 0, owner A
                               {7800, 0, 12, 28, 0}},      // flight 1, owner B, near C
                              {}, Mode::Cooperated);
    inst.operators[1].priority.emplace_back(inst.flights[1].node, 1);
    inst.finalize();
    REQUIRE(inst.fleet_of_vehicle(2).serviceable[1]);   // C reaches flight 1
    REQUIRE_FALSE(inst.fleet_of_vehicle(2).serviceable[0]);
    Solution sol = Solution::empty(inst);
    commit_insertion(sol, inst, 1, 0, 0);  // B takes the foreign flight 0
    commit_insertion(sol, inst, 2, 0, 1);  // C takes B's marked flight 1
    sol.violations = priority_violations(sol, inst);
    REQUIRE(sol.violations >= 1);
    Rng rng(11);
    auto pairs = destroy_priority(sol, inst, 2, rng);
    REQUIRE(pairs.has_value());
    CHECK_FALSE(repair_priority(sol, inst, *pairs));
}

TEST_CASE("priority repair with no pairs is the identity") {
    Instance inst = priority_fixture();
    Solution sol = seeded_solution(inst);
    Solution copy = sol;
    CHECK(repair_priority(copy, inst, {}));
    CHECK(copy.routes == sol.routes);
}

TEST_CASE("priority destroy takes two disjoint pairs when asked for four nodes") {
    Instance inst = th::build({{0, 0, 2, 2, 10000, 1}, {4000, 0, 2, 2, 10000, 1}},
                              {{1000, 0, 10, 30, 0},
                               {3000, 0, 12, 28, 0},
                               {1200, 0, 50, 70, 0},
                               {2800, 0, 52, 68, 0}},
                              {}, Mode::Cooperated);
    inst.operators[1].priority.emplace_back(inst.flights[1].node, 1);
    inst.operators[1].priority.emplace_back(inst.flights[3].node, 1);
    inst.finalize();
    Solution sol = Solution::empty(inst);
    commit_insertion(sol, inst, 2, 0, 0);  // op 1 vehicles are 2 and 3
    commit_insertion(sol, inst, 2, 1, 2);
    commit_insertion(sol, inst, 0, 0, 1);  // op 0 takes both of op 1's marked flights
    commit_insertion(sol, inst, 0, 1, 3);
    sol.violations = priority_violations(sol, inst);
    REQUIRE(sol.violations == 2);
    Rng rng(12);
    auto pairs = destroy_priority(sol, inst, 4, rng);
    REQUIRE(pairs.has_value());
    CHECK(pairs->size() == 2);
    std::set<int> touched;
    for (const auto& p : *pairs) {
        touched.insert(p.flight_i);
        touched.insert(p.flight_j);
    }
    CHECK(touched.size() == 4);
}

TEST_CASE("random repair: single flight between the depots") {
    Instance inst = th::build({{0, 0, 1}}, {{500, 0, 5, 20, 0}});
    Solution sol = seeded_solution(inst);
    Rng rng(13);
    auto removed = destroy_random(sol, inst, 1, rng);
    REQUIRE(repair_random(sol, inst, EvalParams{}, removed, rng));
    CHECK(sol.routes[0] == std::vector<int>{0});
}

TEST_CASE("random repair: positions land uniformly over feasible slots") {
    // one vehicle with flights [1, 2] fixed; flight 0 re-inserted into one of
    // three positions
    Instance inst = th::build({{0, 0, 1}},
                              {{500, 0, 0, 400, 0}, {600, 0, 0, 400, 0}, {700, 0, 0, 400, 0}},
                              {}, Mode::Separated);
    Solution base = Solution::empty(inst);
    commit_insertion(base, inst, 0, 0, 1);
    commit_insertion(base, inst, 0, 1, 2);
    int hits[3] = {0, 0, 0};
    Rng rng(14);
    const int N = 3000;
    for (int i = 0; i < N; ++i) {
        Solution sol = base;
        REQUIRE(repair_random(sol, inst, EvalParams{}, {0}, rng));
        for (int p = 0; p < 3; ++p)
            if (sol.routes[0][p] == 0) ++hits[p];
    }
    for (int h : hits) CHECK(std::abs(h / double(N) - 1.0 / 3.0) < 0.03);
}

TEST_CASE("random repair: flight with no feasible slot fails") {
    Instance inst = th::build({{0, 0, 1, 1, 0}, {5000, 0, 1, 1, 0}}, {{100, 0, 5, 20, 0}});
    Solution sol = Solution::empty(inst);
    Rng rng(15);
    // vehicle 1 belongs to operator 1 which cannot serve the flight; strip
    // vehicle 0 by filling... instead ask to repair a flight nobody can take
    Instance blocked = inst;
    blocked.operators[0].fleet_size = 0;
    blocked.operators[0].shared_count = 0;
    blocked.finalize();
    Solution empty = Solution::empty(blocked);
    CHECK_FALSE(repair_random(empty, blocked, EvalParams{}, {0}, rng));
}

TEST_CASE("greedy repair commits the smallest increment") {
    Instance inst = regret_fixture();
    Solution sol = Solution::empty(inst);
    // flight X (index 0): slots cost 4 on vehicle 0, 9 on vehicle 1
    auto c0 = evaluate_insertion(sol, inst, EvalParams{}, 0, 0, 0);
    auto c1 = evaluate_insertion(sol, inst, EvalParams{}, 1, 0, 0);
    REQUIRE(c0.has_value());
    REQUIRE(c1.has_value());
    CHECK(c0->delta_eval == Catch::Approx(4.0));
    CHECK(c1->delta_eval == Catch::Approx(9.0));
    REQUIRE(repair_greedy(sol, inst, EvalParams{}, {0}, false));
    CHECK(sol.routes[0] == std::vector<int>{0});
}

TEST_CASE("greedy delay variant falls back to slot order when all slots are clean") {
    Instance inst = regret_fixture();
    Solution sol = Solution::empty(inst);
    REQUIRE(repair_greedy(sol, inst, EvalParams{}, {0}, true));
    // zero delay increment everywhere: earliest vehicle, earliest position
    CHECK(sol.routes[0] == std::vector<int>{0});
}

TEST_CASE("reinserting the worst-removed flight at its old slot restores evaluate") {
    Instance inst = generate_scenario(th::tiny_spec(6, 3), 31);
    Solution sol = seeded_solution(inst);
    EvalParams ep;
    double before = evaluate(sol, inst, ep);
    Rng rng(16);
    Solution working = sol;
    auto removed = destroy_worst(working, inst, ep, 1, detail::GainKind::Evaluate, 6, rng);
    REQUIRE(removed.size() == 1);
    int f = removed[0];
    int v = sol.serving_vehicle[f];
    int pos = static_cast<int>(std::find(sol.routes[v].begin(), sol.routes[v].end(), f) -
                               sol.routes[v].begin());
    commit_insertion(working, inst, v, pos, f);
    CHECK(evaluate(working, inst, ep) == Catch::Approx(before));
    CHECK(working.routes == sol.routes);
}

TEST_CASE("regret repair draws flights proportionally to their regret") {
    Instance inst = regret_fixture();
    // regrets: X -> 9 - 4 = 5, Y -> 6 - 5 = 1; X should be placed first (and
    // claim vehicle 0) five times out of six
    const int N = 3000;
    int x_first = 0;
    Rng rng(17);
    for (int i = 0; i < N; ++i) {
        Solution sol = Solution::empty(inst);
        REQUIRE(repair_kth_regret(sol, inst, EvalParams{}, {0, 1}, 2, rng));
        REQUIRE(sol.complete());
        if (sol.routes[0] == std::vector<int>{0}) ++x_first;
        else REQUIRE(sol.routes[0] == std::vector<int>{1});
    }
    CHECK(std::abs(x_first / double(N) - 5.0 / 6.0) < 0.03);
}

TEST_CASE("regret repair with equal regrets draws uniformly") {
    // co-located flights: identical slot costs, identical regrets; the flight
    // drawn second ends up in front of the first
    Instance inst = th::build({{0, 0, 1, 1, 10000, 1}, {4000, 0, 1, 1, 10000, 1}},
                              {{1000, 0, 0, 500, 0}, {1000, 0, 0, 500, 0}},
                              {}, Mode::Cooperated);
    const int N = 3000;
    int zero_first = 0;
    Rng rng(18);
    for (int i = 0; i < N; ++i) {
        Solution sol = Solution::empty(inst);
        REQUIRE(repair_kth_regret(sol, inst, EvalParams{}, {0, 1}, 2, rng));
        REQUIRE(sol.routes[0].size() == 2);
        if (sol.routes[0][1] == 0) ++zero_first;  // flight 0 placed first
    }
    CHECK(std::abs(zero_first / double(N) - 0.5) < 0.03);
}

TEST_CASE("run is deterministic per seed") {
    Instance inst = generate_scenario(th::tiny_spec(6, 3), 41);
    SearchConfig cfg;
    cfg.t_max = 100;
    cfg.cooling = 0.9;
    cfg.seed = 7;
    cfg.record_trace = true;
    RunResult a = run(inst, cfg);
    RunResult b = run(inst, cfg);
    CHECK(a.best_eval == b.best_eval);
    CHECK(a.best.routes == b.best.routes);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].current_eval == b.trace[i].current_eval);
        CHECK(a.trace[i].destroy == b.trace[i].destroy);
        CHECK(a.trace[i].repair == b.trace[i].repair);
    }
    cfg.seed = 8;
    RunResult c = run(inst, cfg);
    bool same = a.best.routes == c.best.routes && a.trace.size() == c.trace.size();
    CHECK_FALSE(same);
}

TEST_CASE("run with temperature at one returns the greedy seed") {
    Instance inst = generate_scenario(th::tiny_spec(5, 2), 43);
    SearchConfig cfg;
    cfg.t_max = 1.0;
    RunResult res = run(inst, cfg);
    CHECK(res.iterations == 0);
    Solution seed = initial_solution(inst, cfg.eval);
    seed.violations = priority_violations(seed, inst);
    CHECK(res.best_eval == Catch::Approx(evaluate(seed, inst, cfg.eval)));
}

TEST_CASE("iteration count follows the cooling schedule") {
    Instance inst = th::build({{0, 0, 1}}, {{500, 0, 5, 20, 0}});
    SearchConfig cfg;
    cfg.t_max = 1e4;
    cfg.cooling = 0.99;
    RunResult res = run(inst, cfg);
    int expect = static_cast<int>(std::ceil(std::log(1e4) / -std::log(0.99)));
    CHECK(res.iterations == expect);
}

TEST_CASE("destroy plus repair keeps cover, flow and energy intact") {
    Instance inst = generate_scenario(th::tiny_spec(8, 3, 2), 47);
    SearchConfig cfg;
    Solution sol = seeded_solution(inst);
    Rng rng(20);
    for (int cycle = 0; cycle < 200; ++cycle) {
        Solution cand = sol;
        int n = 2 + 2 * rng.below(3);
        std::vector<int> removed;
        switch (rng.below(6)) {
            case 0: removed = destroy_random(cand, inst, n, rng); break;
            case 1:
                removed = destroy_worst(cand, inst, cfg.eval, n, detail::GainKind::Evaluate, 6, rng);
                break;
            case 2: removed = destroy_shaw(cand, inst, cfg, n, rng); break;
            case 3:
                removed =
                    destroy_worst(cand, inst, cfg.eval, n, detail::GainKind::TravelOnly, 6, rng);
                break;
            case 4:
                removed = destroy_worst(cand, inst, cfg.eval, n, detail::GainKind::DelayOnly, 6, rng);
                break;
            default: removed = destroy_delay_chain(cand, inst, cfg.eval, n, 6, rng); break;
        }
        bool ok;
        switch (rng.below(4)) {
            case 0: ok = repair_random(cand, inst, cfg.eval, removed, rng); break;
            case 1: ok = repair_greedy(cand, inst, cfg.eval, removed, false); break;
            case 2: ok = repair_kth_regret(cand, inst, cfg.eval, removed, 2, rng); break;
            default: ok = repair_greedy(cand, inst, cfg.eval, removed, true); break;
        }
        if (!ok) continue;
        REQUIRE(cand.complete());
        REQUIRE(cand.feasible());
        // each flight exactly once across all routes
        std::vector<int> seen(inst.num_flights(), 0);
        for (const auto& route : cand.routes)
            for (int f : route) ++seen[f];
        for (int s : seen) REQUIRE(s == 1);
        // energy walk of every plan stays within bounds
        for (int v = 0; v < inst.num_vehicles(); ++v)
            for (const Visit& vis : cand.plans[v].visits) {
                REQUIRE(vis.soc_on_arrival >= inst.vehicle_params.min_soc() - 1e-9);
                REQUIRE(vis.soc_on_arrival <= inst.vehicle_params.capacity + 1e-9);
            }
        sol = std::move(cand);
    }
}
