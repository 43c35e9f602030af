#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "towsched/instance.hpp"
#include "towsched/rng.hpp"
#include "towsched/schedule.hpp"

namespace towsched {

struct SearchConfig {
    double t_max = 1e4;      // initial temperature
    double cooling = 0.99;   // multiplicative factor per iteration
    double w_new_best = 30;  // score increments (w1 >= w2 >= w3)
    double w_accepted = 18;
    double w_rejected = 12;
    double initial_score = 50;
    double chi_worst = 6;    // worst-removal bias exponent
    int chi_shaw = 3;        // Shaw rank position
    double chi_d = 1.0;      // Shaw relatedness weights (distance, start time)
    double chi_e = 1.0;
    std::vector<int> destroy_counts{2, 4, 6};
    int k_regret = 2;
    EvalParams eval;
    std::uint64_t seed = 0;
    bool record_trace = false;
};

enum class DestroyOp : int {
    Random = 0,
    Worst,
    Shaw,
    TravelCost,  // worst-removal variant on f1 only
    Delay,       // worst-removal variant on the delay penalty only
    DelayChain,
    Priority,
};
constexpr int kNumDestroyOps = 7;

enum class RepairOp : int {
    Random = 0,
    Greedy,
    KthRegret,
    Delay,     // greedy variant on the delay penalty only
    Priority,  // forced companion of priority removal, never drawn
};
constexpr int kNumRepairOps = 5;
// Priority insertion is excluded from roulette selection.
constexpr int kSelectableRepairOps = 4;

inline const char* to_string(DestroyOp op) {
    switch (op) {
        case DestroyOp::Random: return "random";
        case DestroyOp::Worst: return "worst";
        case DestroyOp::Shaw: return "shaw";
        case DestroyOp::TravelCost: return "travel_cost";
        case DestroyOp::Delay: return "delay";
        case DestroyOp::DelayChain: return "delay_chain";
        case DestroyOp::Priority: return "priority";
    }
    return "?";
}

inline const char* to_string(RepairOp op) {
    switch (op) {
        case RepairOp::Random: return "random";
        case RepairOp::Greedy: return "greedy";
        case RepairOp::KthRegret: return "kth_regret";
        case RepairOp::Delay: return "delay";
        case RepairOp::Priority: return "priority";
    }
    return "?";
}

struct OperatorBank {
    std::vector<double> destroy_scores;
    std::vector<double> repair_scores;
    std::vector<double> count_scores;

    static OperatorBank initial(const SearchConfig& cfg) {
        OperatorBank b;
        b.destroy_scores.assign(kNumDestroyOps, cfg.initial_score);
        b.repair_scores.assign(kNumRepairOps, cfg.initial_score);
        b.count_scores.assign(cfg.destroy_counts.size(), cfg.initial_score);
        return b;
    }
};

enum class Outcome { NewBest, Accepted, Rejected };

// Adds the outcome's score increment to each chosen bank entry.
inline void update_scores(OperatorBank& bank, int destroy_idx, int repair_idx, int count_idx,
                          Outcome outcome, const SearchConfig& cfg) {
    double w = outcome == Outcome::NewBest    ? cfg.w_new_best
               : outcome == Outcome::Accepted ? cfg.w_accepted
                                              : cfg.w_rejected;
    bank.destroy_scores[destroy_idx] += w;
    bank.repair_scores[repair_idx] += w;
    bank.count_scores[count_idx] += w;
}

// --- construction -------------------------------------------------------------

// Greedy seed: flights in earliest-start order, each appended to the
// serviceable route with the smallest evaluate increment. Falls back to
// arbitrary positions when no append can restore charging.
inline Solution initial_solution(const Instance& inst, const EvalParams& ep) {
    Solution sol = Solution::empty(inst);
    std::vector<int> order(inst.num_flights());
    for (int f = 0; f < inst.num_flights(); ++f) order[f] = f;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (inst.flights[a].earliest != inst.flights[b].earliest)
            return inst.flights[a].earliest < inst.flights[b].earliest;
        return inst.flights[a].node < inst.flights[b].node;
    });

    for (int f : order) {
        int best_v = -1, best_pos = -1;
        double best_delta = kInfinity;
        for (int v = 0; v < inst.num_vehicles(); ++v) {
            int pos = static_cast<int>(sol.routes[v].size());
            auto ev = evaluate_insertion(sol, inst, ep, v, pos, f);
            if (ev && ev->delta_eval < best_delta - kEps) {
                best_delta = ev->delta_eval;
                best_v = v;
                best_pos = pos;
            }
        }
        if (best_v < 0) {
            // appends all failed; consider every position before giving up
            for (int v = 0; v < inst.num_vehicles() && best_v < 0; ++v)
                for (int pos = 0; pos <= static_cast<int>(sol.routes[v].size()); ++pos) {
                    auto ev = evaluate_insertion(sol, inst, ep, v, pos, f);
                    if (ev && ev->delta_eval < best_delta - kEps) {
                        best_delta = ev->delta_eval;
                        best_v = v;
                        best_pos = pos;
                    }
                }
        }
        if (best_v < 0)
            throw InfeasibleError("no serviceable fleet can schedule flight node " +
                                  std::to_string(inst.flights[f].node));
        commit_insertion(sol, inst, best_v, best_pos, f);
    }
    return sol;
}

// --- destroy operators ---------------------------------------------------------

namespace detail {

inline std::vector<int> assigned_flights(const Solution& sol) {
    std::vector<int> out;
    for (int f = 0; f < static_cast<int>(sol.assignment.size()); ++f)
        if (sol.assignment[f] >= 0) out.push_back(f);
    return out;
}

enum class GainKind { Evaluate, TravelOnly, DelayOnly };

// Drop in the chosen cost if flight f were removed from the solution.
inline double removal_gain(const Solution& sol, const Instance& inst, const EvalParams& ep, int f,
                           GainKind kind) {
    int v = sol.serving_vehicle[f];
    std::vector<int> seq = sol.routes[v];
    seq.erase(std::find(seq.begin(), seq.end(), f));
    auto charged = insert_charging(make_trajectory(v, seq, inst), inst);
    double dist = 0.0, delay = 0.0;
    if (charged) {
        Trajectory plan = propagate_timetable(std::move(*charged), inst);
        for (std::size_t i = 1; i < plan.visits.size(); ++i)
            dist += inst.graph.distance.at(plan.visits[i - 1].node, plan.visits[i].node);
        for (const Visit& vis : plan.visits) {
            if (inst.graph.nodes[vis.node].kind != NodeKind::Flight) continue;
            int fi = inst.flight_index(inst.graph.nodes[vis.node].id);
            delay += flight_delay(vis.service_start, inst.flights[fi].latest);
        }
    }
    double d_dist = sol.route_distance[v] - dist;
    double d_delay = sol.route_delay[v] - delay;
    switch (kind) {
        case GainKind::TravelOnly:
            return inst.vehicle_params.unit_energy_cost * d_dist;
        case GainKind::DelayOnly:
            return delay_penalty(sol.total_delay, ep) - delay_penalty(sol.total_delay - d_delay, ep);
        case GainKind::Evaluate: {
            double g = inst.vehicle_params.unit_energy_cost * d_dist +
                       delay_penalty(sol.total_delay, ep) -
                       delay_penalty(sol.total_delay - d_delay, ep);
            if (sol.mode == Mode::Cooperated)
                g += ep.c_eval_pr * violation_delta(sol, inst, f, sol.assignment[f]);
            return g;
        }
    }
    return 0.0;
}

// Rank index of the worst-removal family: floor(D * y^chi) into the
// descending gain list.
inline int biased_rank(int list_size, double y, double chi) {
    int idx = static_cast<int>(list_size * std::pow(y, chi));
    return std::min(idx, list_size - 1);
}

}  // namespace detail

inline std::vector<int> destroy_random(Solution& sol, const Instance& inst, int n, Rng& rng) {
    std::vector<int> pool = detail::assigned_flights(sol);
    std::vector<int> removed;
    for (int i = 0; i < n && !pool.empty(); ++i) {
        int pick = rng.below(static_cast<int>(pool.size()));
        int f = pool[pick];
        pool.erase(pool.begin() + pick);
        remove_flight(sol, inst, f);
        removed.push_back(f);
    }
    return removed;
}

inline std::vector<int> destroy_worst(Solution& sol, const Instance& inst, const EvalParams& ep,
                                      int n, detail::GainKind kind, double chi_worst, Rng& rng) {
    std::vector<int> removed;
    for (int i = 0; i < n; ++i) {
        std::vector<int> pool = detail::assigned_flights(sol);
        if (pool.empty()) break;
        std::vector<std::pair<double, int>> ranked;
        ranked.reserve(pool.size());
        for (int f : pool) ranked.emplace_back(detail::removal_gain(sol, inst, ep, f, kind), f);
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        int idx = detail::biased_rank(static_cast<int>(ranked.size()), rng.uniform01(), chi_worst);
        int f = ranked[idx].second;
        remove_flight(sol, inst, f);
        removed.push_back(f);
    }
    return removed;
}

// Relatedness per the similarity measure: weighted normalized distance plus
// weighted normalized earliest-start difference. Smaller = more related.
inline double shaw_relatedness(const Instance& inst, const SearchConfig& cfg, int i, int j,
                               double max_d, double e_span) {
    double term_d = max_d > kEps ? inst.dist_nodes(inst.node_index(inst.flights[i].node),
                                                   inst.node_index(inst.flights[j].node)) /
                                       max_d
                                 : 0.0;
    double term_e =
        e_span > kEps ? std::abs(inst.flights[i].earliest - inst.flights[j].earliest) / e_span : 0.0;
    return cfg.chi_d * term_d + cfg.chi_e * term_e;
}

inline std::vector<int> destroy_shaw(Solution& sol, const Instance& inst, const SearchConfig& cfg,
                                     int n, Rng& rng) {
    double max_d = 0.0, e_min = kInfinity, e_max = -kInfinity;
    for (int i = 0; i < inst.num_flights(); ++i) {
        e_min = std::min(e_min, inst.flights[i].earliest);
        e_max = std::max(e_max, inst.flights[i].earliest);
        for (int j = i + 1; j < inst.num_flights(); ++j)
            max_d = std::max(max_d, inst.dist_nodes(inst.node_index(inst.flights[i].node),
                                                    inst.node_index(inst.flights[j].node)));
    }
    double e_span = e_max - e_min;

    std::vector<int> pool = detail::assigned_flights(sol);
    if (pool.empty()) return {};
    std::vector<int> removed;
    int pick = rng.below(static_cast<int>(pool.size()));
    removed.push_back(pool[pick]);
    remove_flight(sol, inst, pool[pick]);

    while (static_cast<int>(removed.size()) < n) {
        pool = detail::assigned_flights(sol);
        if (pool.empty()) break;
        int ref = removed[rng.below(static_cast<int>(removed.size()))];
        std::vector<std::pair<double, int>> ranked;
        ranked.reserve(pool.size());
        for (int f : pool)
            ranked.emplace_back(shaw_relatedness(inst, cfg, ref, f, max_d, e_span), f);
        std::sort(ranked.begin(), ranked.end());
        int idx = std::min<int>(cfg.chi_shaw, static_cast<int>(ranked.size())) - 1;
        int f = ranked[idx].second;
        remove_flight(sol, inst, f);
        removed.push_back(f);
    }
    return removed;
}

// Longest run of >= 2 consecutively delayed flights on one route; ties go to
// the lowest vehicle and then the earliest position.
inline std::optional<std::pair<int, int>> longest_delay_chain(const Solution& sol) {
    int best_v = -1, best_pos = -1, best_len = 1;
    for (int v = 0; v < static_cast<int>(sol.routes.size()); ++v) {
        const auto& seq = sol.routes[v];
        int run = 0;
        for (int p = 0; p <= static_cast<int>(seq.size()); ++p) {
            bool delayed = p < static_cast<int>(seq.size()) && sol.flight_delays[seq[p]] > kEps;
            if (delayed) {
                ++run;
            } else {
                if (run > best_len) {
                    best_len = run;
                    best_v = v;
                    best_pos = p - run;
                }
                run = 0;
            }
        }
    }
    if (best_v < 0) return std::nullopt;
    return std::make_pair(best_v, best_pos);
}

inline std::vector<int> destroy_delay_chain(Solution& sol, const Instance& inst,
                                            const EvalParams& ep, int n, double chi_worst,
                                            Rng& rng) {
    std::vector<int> removed;
    while (static_cast<int>(removed.size()) < n) {
        auto chain = longest_delay_chain(sol);
        if (!chain) break;
        int f = sol.routes[chain->first][chain->second];
        remove_flight(sol, inst, f);
        removed.push_back(f);
    }
    if (static_cast<int>(removed.size()) < n) {
        auto rest = destroy_worst(sol, inst, ep, n - static_cast<int>(removed.size()),
                                  detail::GainKind::DelayOnly, chi_worst, rng);
        removed.insert(removed.end(), rest.begin(), rest.end());
    }
    return removed;
}

// A removed pair from priority destruction: the flights plus the route slots
// they occupied, recorded against the pre-destroy solution.
struct PrioritySwap {
    int flight_i = -1;  // served at priority 0
    int flight_j = -1;  // the overlapping priority-1 flight served elsewhere
    int vehicle_i = -1, pos_i = -1;
    int vehicle_j = -1, pos_j = -1;
};

// Pairs a served priority-0 flight i with an overlapping flight j that the
// serving operator marks priority 1 but does not serve. Returns nothing when
// no such pair exists (caller reselects the destroy operator without scoring).
// Slots are snapshot against the pre-destroy routes; removal happens after
// all pairs are chosen so the repair swap can restore positions exactly.
inline std::optional<std::vector<PrioritySwap>> destroy_priority(Solution& sol,
                                                                 const Instance& inst, int n,
                                                                 Rng& rng) {
    std::vector<PrioritySwap> pairs;
    std::vector<char> taken(inst.num_flights(), 0);
    auto qualifies = [&](int i, int r, int j) {
        return j != i && !taken[j] && sol.assignment[j] >= 0 && sol.assignment[j] != r &&
               inst.overlap[i][j] && inst.priority_of(j, r) == 1;
    };
    auto position_of = [&](int f) {
        int v = sol.serving_vehicle[f];
        const auto& seq = sol.routes[v];
        int pos = static_cast<int>(std::find(seq.begin(), seq.end(), f) - seq.begin());
        return std::make_pair(v, pos);
    };

    while (static_cast<int>(pairs.size()) * 2 < n) {
        std::vector<int> seeds;
        for (int i = 0; i < inst.num_flights(); ++i) {
            int r = sol.assignment[i];
            if (taken[i] || r < 0 || inst.priority_of(i, r) != 0) continue;
            for (int j = 0; j < inst.num_flights(); ++j)
                if (qualifies(i, r, j)) {
                    seeds.push_back(i);
                    break;
                }
        }
        if (seeds.empty()) break;
        int i = seeds[rng.below(static_cast<int>(seeds.size()))];
        int r = sol.assignment[i];
        std::vector<int> partners;
        for (int j = 0; j < inst.num_flights(); ++j)
            if (qualifies(i, r, j)) partners.push_back(j);
        int j = partners[rng.below(static_cast<int>(partners.size()))];

        PrioritySwap p;
        p.flight_i = i;
        p.flight_j = j;
        std::tie(p.vehicle_i, p.pos_i) = position_of(i);
        std::tie(p.vehicle_j, p.pos_j) = position_of(j);
        taken[i] = taken[j] = 1;
        pairs.push_back(p);
    }
    if (pairs.empty()) return std::nullopt;
    for (const PrioritySwap& p : pairs) {
        remove_flight(sol, inst, p.flight_i);
        remove_flight(sol, inst, p.flight_j);
    }
    return pairs;
}

// --- repair operators -----------------------------------------------------------

struct Slot {
    int vehicle = -1;
    int pos = -1;
};

namespace detail {

inline std::vector<std::pair<Slot, InsertionEval>> feasible_slots(const Solution& sol,
                                                                  const Instance& inst,
                                                                  const EvalParams& ep, int f) {
    std::vector<std::pair<Slot, InsertionEval>> out;
    for (int v = 0; v < static_cast<int>(sol.routes.size()); ++v) {
        if (!inst.fleet_of_vehicle(v).serviceable[f]) continue;
        for (int pos = 0; pos <= static_cast<int>(sol.routes[v].size()); ++pos) {
            auto ev = evaluate_insertion(sol, inst, ep, v, pos, f);
            if (ev) out.push_back({{v, pos}, *ev});
        }
    }
    return out;
}

}  // namespace detail

inline bool repair_random(Solution& sol, const Instance& inst, const EvalParams& ep,
                          const std::vector<int>& removed, Rng& rng) {
    for (int f : removed) {
        auto slots = detail::feasible_slots(sol, inst, ep, f);
        if (slots.empty()) return false;
        const Slot& s = slots[rng.below(static_cast<int>(slots.size()))].first;
        commit_insertion(sol, inst, s.vehicle, s.pos, f);
    }
    return true;
}

// Greedy family: commit the globally cheapest (flight, slot) by the chosen
// increment until everything is placed. Ties resolve to the earliest vehicle,
// position, then flight.
inline bool repair_greedy(Solution& sol, const Instance& inst, const EvalParams& ep,
                          std::vector<int> removed, bool delay_only) {
    while (!removed.empty()) {
        double best = kInfinity;
        Slot best_slot;
        std::size_t best_f = 0;
        bool found = false;
        for (int v = 0; v < static_cast<int>(sol.routes.size()); ++v) {
            for (int pos = 0; pos <= static_cast<int>(sol.routes[v].size()); ++pos) {
                for (std::size_t fi = 0; fi < removed.size(); ++fi) {
                    if (!inst.fleet_of_vehicle(v).serviceable[removed[fi]]) continue;
                    auto ev = evaluate_insertion(sol, inst, ep, v, pos, removed[fi]);
                    if (!ev) continue;
                    double cost = delay_only ? ev->delta_dl_penalty : ev->delta_eval;
                    if (!found || cost < best - kEps) {
                        best = cost;
                        best_slot = {v, pos};
                        best_f = fi;
                        found = true;
                    }
                }
            }
        }
        if (!found) return false;
        commit_insertion(sol, inst, best_slot.vehicle, best_slot.pos, removed[best_f]);
        removed.erase(removed.begin() + best_f);
    }
    return true;
}

// Regret insertion: flights are drawn with probability proportional to
// r_f^k = sum_{h=2..k} (c_f^h - c_f^1) and placed at their best slot.
inline bool repair_kth_regret(Solution& sol, const Instance& inst, const EvalParams& ep,
                              std::vector<int> removed, int k, Rng& rng) {
    while (!removed.empty()) {
        std::vector<double> regrets(removed.size(), -1.0);  // -1 marks "no slot"
        std::vector<Slot> best_slots(removed.size());
        bool any = false;
        for (std::size_t fi = 0; fi < removed.size(); ++fi) {
            auto slots = detail::feasible_slots(sol, inst, ep, removed[fi]);
            if (slots.empty()) continue;
            any = true;
            std::vector<double> costs;
            costs.reserve(slots.size());
            double best_cost = kInfinity;
            for (const auto& [slot, ev] : slots) {
                costs.push_back(ev.delta_eval);
                if (ev.delta_eval < best_cost - kEps) {
                    best_cost = ev.delta_eval;
                    best_slots[fi] = slot;
                }
            }
            std::sort(costs.begin(), costs.end());
            double regret = 0.0;
            for (int h = 1; h < k && h < static_cast<int>(costs.size()); ++h)
                regret += costs[h] - costs[0];
            regrets[fi] = regret;
        }
        if (!any) return false;

        double total = 0.0;
        for (double r : regrets)
            if (r > 0) total += r;
        std::size_t chosen = 0;
        if (total > kEps) {
            double u = rng.uniform01() * total, acc = 0.0;
            chosen = removed.size() - 1;
            for (std::size_t fi = 0; fi < removed.size(); ++fi) {
                if (regrets[fi] <= 0) continue;
                acc += regrets[fi];
                if (u < acc) {
                    chosen = fi;
                    break;
                }
            }
            if (regrets[chosen] < 0) return false;
        } else {
            // all regrets zero: uniform among flights that have a slot
            std::vector<std::size_t> open;
            for (std::size_t fi = 0; fi < removed.size(); ++fi)
                if (regrets[fi] >= 0) open.push_back(fi);
            chosen = open[rng.below(static_cast<int>(open.size()))];
        }
        commit_insertion(sol, inst, best_slots[chosen].vehicle, best_slots[chosen].pos,
                         removed[chosen]);
        removed.erase(removed.begin() + chosen);
    }
    return true;
}

// Re-insert each removed pair with the two flights exchanged: j takes i's
// former slot and i takes j's. Fails when a swapped flight is outside the
// receiving fleet's serviceable set or charging cannot be restored.
inline bool repair_priority(Solution& sol, const Instance& inst,
                            const std::vector<PrioritySwap>& pairs) {
    struct Pending {
        int vehicle, pos, flight;
    };
    std::vector<Pending> inserts;
    for (const PrioritySwap& p : pairs) {
        if (!inst.fleet_of_vehicle(p.vehicle_i).serviceable[p.flight_j]) return false;
        if (!inst.fleet_of_vehicle(p.vehicle_j).serviceable[p.flight_i]) return false;
        inserts.push_back({p.vehicle_i, p.pos_i, p.flight_j});
        inserts.push_back({p.vehicle_j, p.pos_j, p.flight_i});
    }
    // Ascending positions per vehicle restore the recorded slots exactly.
    std::sort(inserts.begin(), inserts.end(), [](const Pending& a, const Pending& b) {
        if (a.vehicle != b.vehicle) return a.vehicle < b.vehicle;
        return a.pos < b.pos;
    });
    for (const Pending& ins : inserts) {
        int pos = std::min<int>(ins.pos, static_cast<int>(sol.routes[ins.vehicle].size()));
        commit_insertion(sol, inst, ins.vehicle, pos, ins.flight);
    }
    return sol.feasible();
}

// --- main loop -------------------------------------------------------------------

struct TraceRow {
    int iteration = 0;
    double temperature = 0.0;
    double current_eval = 0.0;
    double best_eval = 0.0;
    int n = 0;
    DestroyOp destroy = DestroyOp::Random;
    RepairOp repair = RepairOp::Random;
    Outcome outcome = Outcome::Rejected;
};

struct RunResult {
    Solution best;
    double best_eval = 0.0;
    int iterations = 0;
    OperatorBank bank;
    std::vector<TraceRow> trace;
};

// Simulated-annealing ALNS loop: select a destroy count, destroy operator and
// repair operator by score, apply them, re-insert charging, then accept new
// bests outright and worse candidates with probability exp(-gap / T).
// Deterministic for a fixed (instance, config) pair.
inline RunResult run(const Instance& inst, const SearchConfig& cfg) {
    Rng rng(cfg.seed);
    RunResult res;
    res.bank = OperatorBank::initial(cfg);

    Solution current = initial_solution(inst, cfg.eval);
    current.violations = priority_violations(current, inst);
    double current_eval = evaluate(current, inst, cfg.eval);
    res.best = current;
    res.best_eval = current_eval;

    double temperature = cfg.t_max;
    int iteration = 0;
    while (temperature > 1.0) {
        ++iteration;
        int count_idx = weighted_index(res.bank.count_scores, rng);
        int n = std::min(cfg.destroy_counts[count_idx],
                         static_cast<int>(detail::assigned_flights(current).size()));
        int destroy_idx = weighted_index(res.bank.destroy_scores, rng);

        Solution cand = current;
        std::vector<int> removed;
        std::vector<PrioritySwap> pairs;
        bool use_priority_repair = false;

        if (static_cast<DestroyOp>(destroy_idx) == DestroyOp::Priority) {
            auto got = destroy_priority(cand, inst, n, rng);
            if (!got) {
                // no qualifying pair: reselect among the other operators
                // without touching the priority score
                std::vector<double> others;
                for (int i = 0; i < kNumDestroyOps; ++i)
                    if (i != static_cast<int>(DestroyOp::Priority))
                        others.push_back(res.bank.destroy_scores[i]);
                int pick = weighted_index(others, rng);
                destroy_idx = pick >= static_cast<int>(DestroyOp::Priority) ? pick + 1 : pick;
            } else {
                pairs = *got;
                use_priority_repair = true;
            }
        }

        switch (static_cast<DestroyOp>(destroy_idx)) {
            case DestroyOp::Random:
                removed = destroy_random(cand, inst, n, rng);
                break;
            case DestroyOp::Worst:
                removed = destroy_worst(cand, inst, cfg.eval, n, detail::GainKind::Evaluate,
                                        cfg.chi_worst, rng);
                break;
            case DestroyOp::Shaw:
                removed = destroy_shaw(cand, inst, cfg, n, rng);
                break;
            case DestroyOp::TravelCost:
                removed = destroy_worst(cand, inst, cfg.eval, n, detail::GainKind::TravelOnly,
                                        cfg.chi_worst, rng);
                break;
            case DestroyOp::Delay:
                removed = destroy_worst(cand, inst, cfg.eval, n, detail::GainKind::DelayOnly,
                                        cfg.chi_worst, rng);
                break;
            case DestroyOp::DelayChain:
                removed = destroy_delay_chain(cand, inst, cfg.eval, n, cfg.chi_worst, rng);
                break;
            case DestroyOp::Priority:
                break;  // already handled
        }

        int repair_idx;
        bool repaired;
        if (use_priority_repair) {
            repair_idx = static_cast<int>(RepairOp::Priority);
            repaired = repair_priority(cand, inst, pairs);
        } else {
            std::vector<double> selectable(res.bank.repair_scores.begin(),
                                           res.bank.repair_scores.begin() + kSelectableRepairOps);
            repair_idx = weighted_index(selectable, rng);
            switch (static_cast<RepairOp>(repair_idx)) {
                case RepairOp::Random:
                    repaired = repair_random(cand, inst, cfg.eval, removed, rng);
                    break;
                case RepairOp::Greedy:
                    repaired = repair_greedy(cand, inst, cfg.eval, removed, false);
                    break;
                case RepairOp::KthRegret:
                    repaired = repair_kth_regret(cand, inst, cfg.eval, removed, cfg.k_regret, rng);
                    break;
                default:
                    repaired = repair_greedy(cand, inst, cfg.eval, removed, true);
                    break;
            }
        }

        Outcome outcome;
        if (repaired && cand.feasible() && cand.complete()) {
            double cand_eval = evaluate(cand, inst, cfg.eval);
            if (cand_eval < res.best_eval) {
                res.best = cand;
                res.best_eval = cand_eval;
                current = std::move(cand);
                current_eval = cand_eval;
                outcome = Outcome::NewBest;
            } else if (rng.uniform01() <= std::exp(-(cand_eval - res.best_eval) / temperature)) {
                current = std::move(cand);
                current_eval = cand_eval;
                outcome = Outcome::Accepted;
            } else {
                outcome = Outcome::Rejected;
            }
            update_scores(res.bank, destroy_idx, repair_idx, count_idx, outcome, cfg);
        } else {
            // repair terminated; selection is redone next iteration, scores
            // untouched (the temperature still cools so the loop terminates)
            outcome = Outcome::Rejected;
        }

        if (cfg.record_trace)
            res.trace.push_back({iteration, temperature, current_eval, res.best_eval, n,
                                 static_cast<DestroyOp>(destroy_idx),
                                 static_cast<RepairOp>(repair_idx), outcome});
        temperature *= cfg.cooling;
    }
    res.iterations = iteration;
    return res;
}

}  // namespace towsched
