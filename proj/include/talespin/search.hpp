#pragma once
//
// Forward-chaining baseline: best-first search over action applications, and
// a two-agent mode where an antagonist moves between the hero's actions.
//

#include <climits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "talespin/planner.hpp"
#include "talespin/simulator.hpp"

namespace talespin {

struct SearchConfig {
  std::size_t max_depth = 8;
  /// "plan_distance": minus the length of the shortest backward plan to the
  /// goal. "goal_test": 0 at the goal, -1 elsewhere (uninformed).
  std::string evaluation = "plan_distance";
};

class UnknownEvaluation : public Error {
 public:
  explicit UnknownEvaluation(const std::string& name) : Error("unknown evaluation '" + name + "'") {}
};

class Stalemate : public SimulationError {
 public:
  Stalemate(const Term& goal, std::size_t turns, Trace partial)
      : SimulationError("stalemate: " + goal.str() + " not reached after " + std::to_string(turns) + " hero turns",
                        std::move(partial)) {}
};

inline constexpr int kUnreachable = INT_MIN;

/// Score of `sitn` with respect to `goal`; higher is nearer. `bound` limits
/// how far ahead plan_distance looks. kUnreachable when no plan fits.
inline int evaluate_situation(const Situation& sitn, const Term& goal, const KnowledgeBase& kb,
                              const std::string& evaluation, std::size_t bound) {
  if (evaluation == "goal_test") return holds(goal, sitn, kb.rules) ? 0 : -1;
  if (evaluation != "plan_distance") throw UnknownEvaluation(evaluation);
  if (holds(goal, sitn, kb.rules)) return 0;
  auto plans = enumerate_plans(goal, sitn, kb, {bound, "constant"});
  if (plans.empty()) return kUnreachable;
  std::size_t best = plans.front().size();
  for (const auto& p : plans) best = std::min(best, p.size());
  return -static_cast<int>(best);
}

namespace detail {

inline Term path_term(const std::vector<EventInstance>& path) {
  std::vector<Term> heads;
  for (const auto& e : path) heads.push_back(e.head);
  return Term::compound("plan", std::move(heads));
}

inline std::optional<Situation> apply_instance(const EventInstance& ev, const Situation& sitn) {
  for (const auto& t : ev.dels)
    if (!t.is_ground() || !sitn.contains(t)) return std::nullopt;
  for (const auto& t : ev.adds)
    if (!t.is_ground()) return std::nullopt;
  return apply_effects(ev.dels, ev.adds, sitn);
}

}  // namespace detail

/// Best-first search from `sitn` over the KB's actions. Nodes are ordered by
/// evaluation, then shorter path, then the compare_terms-greater path (the
/// same tie-break make_best_plan uses). Situations are expanded once.
inline Plan forward_search(const Situation& sitn, const Term& goal, const KnowledgeBase& kb,
                           const SearchConfig& cfg = {}) {
  if (cfg.max_depth == 0) throw std::invalid_argument("max_depth must be at least 1");
  struct Node {
    Situation sit;
    std::vector<EventInstance> path;
    Term key;
    int score;
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.path.size() != b.path.size()) return a.path.size() > b.path.size();
    return compare_terms(a.key, b.key) < 0;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  std::set<Situation, SituationLess> closed;

  open.push({sitn, {}, detail::path_term({}), evaluate_situation(sitn, goal, kb, cfg.evaluation, cfg.max_depth)});
  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (!closed.insert(node.sit).second) continue;
    if (holds(goal, node.sit, kb.rules)) {
      Plan plan;
      for (auto& ev : node.path) plan.steps.push_back({std::move(ev), goal, std::nullopt, std::nullopt});
      return plan;
    }
    if (node.path.size() >= cfg.max_depth) continue;
    std::size_t remaining = cfg.max_depth - node.path.size() - 1;
    for (auto& ev : applicable_events(node.sit, kb, EventKind::Action)) {
      auto next = detail::apply_instance(ev, node.sit);
      if (!next || closed.count(*next)) continue;
      Node child{std::move(*next), node.path, Term(), 0};
      child.path.push_back(std::move(ev));
      child.key = detail::path_term(child.path);
      child.score = evaluate_situation(child.sit, goal, kb, cfg.evaluation, remaining);
      open.push(std::move(child));
    }
  }
  throw NoPlanFound(goal);
}

/// `kb` with the antagonist's definitions appended as happenings, so that the
/// hero's planner never uses them and traces can index them.
inline KnowledgeBase adversarial_world(const KnowledgeBase& kb, const std::vector<EventDef>& antagonist) {
  KnowledgeBase world = kb;
  for (auto def : antagonist) {
    def.kind = EventKind::Happening;
    world.events.push_back(std::move(def));
  }
  return world;
}

/// Hero and antagonist alternate, hero first. The hero takes the first action
/// of a fresh forward search; the antagonist takes whichever of its applicable
/// moves leaves the hero worst off (zero-sum), or passes when none applies.
/// Antagonist moves are recorded as happenings. Indices in the trace refer
/// to adversarial_world(kb, antagonist).
inline Trace adversarial_story(const KnowledgeBase& kb, const Term& hero_goal,
                               const std::vector<EventDef>& antagonist, const SearchConfig& cfg = {}) {
  for (const auto& a : antagonist)
    for (const auto& e : kb.events)
      if (e.kind == EventKind::Action && e.head.name() == a.head.name() && e.head.arity() == a.head.arity())
        throw Error("antagonist action " + a.head.str() + " is also a hero action");

  KnowledgeBase world = adversarial_world(kb, antagonist);
  Trace tr;
  tr.initial = kb.init;
  tr.goal_history.push_back({0, hero_goal, std::nullopt});
  Situation cur = kb.init;

  for (std::size_t turn = 0;; ++turn) {
    if (holds(hero_goal, cur, world.rules)) return tr;
    if (turn == cfg.max_depth) throw Stalemate(hero_goal, turn, tr);

    Plan plan;
    try {
      plan = forward_search(cur, hero_goal, world, cfg);
    } catch (const NoPlanFound&) {
      throw Stalemate(hero_goal, turn, tr);
    }
    const EventInstance& move = plan.steps.front().event;
    Situation post = apply_effects(move.dels, move.adds, cur);
    std::size_t plan_index = tr.plans.size();
    int quality = plan_quality(plan);
    tr.plans.push_back({tr.steps.size(), {plan, quality}, 0});
    tr.steps.push_back({move, cur, post, Justification{plan_index, 0}});
    cur = std::move(post);
    if (holds(hero_goal, cur, world.rules)) return tr;

    std::optional<EventInstance> best;
    std::optional<Situation> best_post;
    int best_score = 0;
    for (auto& ev : applicable_events(cur, world, EventKind::Happening)) {
      if (ev.def < kb.events.size()) continue;
      auto next = detail::apply_instance(ev, cur);
      if (!next) continue;
      int score = evaluate_situation(*next, hero_goal, world, cfg.evaluation, cfg.max_depth);
      if (!best || score < best_score) {
        best = std::move(ev);
        best_post = std::move(next);
        best_score = score;
      }
    }
    if (best) {
      tr.steps.push_back({*best, cur, *best_post, std::nullopt});
      cur = std::move(*best_post);
    }
  }
}

}  // namespace talespin
