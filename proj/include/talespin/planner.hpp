#pragma once
//
// Backward-chaining means-ends planner over STRIPS event schemas.
//
// A goal already satisfied needs no actions. Otherwise every action whose
// add-list achieves the goal (directly, or through a derivation rule whose
// body the add-list covers) is tried: its preconditions are planned left to
// right, threading the simulated situation, then its effects are applied.
// A goal stack blocks circular subgoaling and a length budget bounds the
// search. Every plan is returned with the goal each step was chosen for.
//

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "talespin/kb.hpp"
#include "talespin/term.hpp"

namespace talespin {

class NoPlanFound : public Error {
 public:
  explicit NoPlanFound(const Term& goal) : Error("no plan found for goal " + goal.str()), goal_(goal) {}
  const Term& goal() const { return goal_; }

 private:
  Term goal_;
};

class MissingDeleteFact : public Error {
 public:
  explicit MissingDeleteFact(const Term& fact)
      : Error("delete-list fact " + fact.str() + " is not in the situation"), fact_(fact) {}
  const Term& fact() const { return fact_; }

 private:
  Term fact_;
};

class UnknownScorer : public Error {
 public:
  explicit UnknownScorer(const std::string& name) : Error("unknown plan scorer '" + name + "'") {}
};

/// A fully instantiated occurrence of an event definition.
struct EventInstance {
  std::size_t def = 0;
  EventKind kind = EventKind::Action;
  Term head;
  /// Definition variable (as written in the KB) -> ground value, including
  /// variables bound only by preconditions.
  std::map<std::string, Term> bindings;
  std::vector<Term> pcs;
  std::vector<Term> dels;
  std::vector<Term> adds;

  friend bool operator==(const EventInstance&, const EventInstance&) = default;
};

struct PlanStep {
  EventInstance event;
  /// The (sub)goal this action was chosen to achieve.
  Term achieves_goal;
  /// Index into kb.rules when the goal was achieved through a derivation rule.
  std::optional<std::size_t> via_rule;
  /// Index of the later step whose precondition `achieves_goal` is; empty for
  /// the step that achieves the plan's own goal.
  std::optional<std::size_t> serves;

  const Term& action() const { return event.head; }

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct Plan {
  std::vector<PlanStep> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }

  std::vector<Term> actions() const {
    std::vector<Term> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.event.head);
    return out;
  }

  /// `plan(a1,...,an)`, or the atom `plan` when empty. Used for tie-breaking.
  Term as_term() const { return Term::compound("plan", actions()); }

  friend bool operator==(const Plan&, const Plan&) = default;
};

struct ScoredPlan {
  Plan plan;
  int quality = 0;

  friend bool operator==(const ScoredPlan&, const ScoredPlan&) = default;
};

struct PlannerConfig {
  std::size_t max_plan_length = 20;
  std::string scorer = "appendix";
};

// ---------------------------------------------------------------------------
// Satisfaction

namespace detail {

inline constexpr int kRuleDepthLimit = 16;

using SubstK = std::function<void(const Substitution&)>;

inline void solve_facts(std::span<const Term> facts, std::size_t i, const Situation& sit,
                        std::span<const DerivationRule> rules, const Substitution& s, int depth, const SubstK& k);

/// Every extension of `s` under which `fact` holds in `sit`, by membership or
/// through derivation rules. May report the same instantiation more than once.
inline void solve_fact(const Term& fact, const Situation& sit, std::span<const DerivationRule> rules,
                       const Substitution& s, int depth, const SubstK& k) {
  Term f = s.apply(fact);
  if (f.is_variable()) return;
  if (f.is_ground()) {
    if (sit.contains(f)) k(s);
  } else {
    for (const auto& x : sit)
      if (x.name() == f.name() && x.arity() == f.arity())
        if (auto s2 = unify(f, x, s)) k(*s2);
  }
  if (depth >= kRuleDepthLimit) return;
  for (const auto& rule : rules) {
    if (rule.head.name() != f.name() || rule.head.arity() != f.arity()) continue;
    Renamer rn;
    Term head = rn(rule.head);
    auto body = rn(std::span<const Term>(rule.body));
    if (auto s1 = unify(head, f, s)) solve_facts(body, 0, sit, rules, *s1, depth + 1, k);
  }
}

inline void solve_facts(std::span<const Term> facts, std::size_t i, const Situation& sit,
                        std::span<const DerivationRule> rules, const Substitution& s, int depth, const SubstK& k) {
  if (i == facts.size()) {
    k(s);
    return;
  }
  solve_fact(facts[i], sit, rules, s, depth,
             [&](const Substitution& s2) { solve_facts(facts, i + 1, sit, rules, s2, depth, k); });
}

/// Distinct instantiations of `fact` (under `s`) that hold in `sit`, each with
/// the extended substitution that produced it.
inline std::vector<std::pair<Term, Substitution>> satisfying_instances(const Term& fact, const Situation& sit,
                                                                       std::span<const DerivationRule> rules,
                                                                       const Substitution& s) {
  std::vector<std::pair<Term, Substitution>> out;
  TermSet seen;
  solve_fact(fact, sit, rules, s, 0, [&](const Substitution& s2) {
    Term inst = s2.apply(fact);
    if (seen.insert(inst).second) out.emplace_back(inst, s2);
  });
  return out;
}

}  // namespace detail

/// All substitutions (restricted to `fact`'s variables, duplicates removed)
/// under which `fact` holds in `sitn`. Empty means unsatisfied.
inline std::vector<Substitution> satisfied(const Term& fact, const Situation& sitn,
                                           std::span<const DerivationRule> rules) {
  auto vars = variables_of(fact);
  std::vector<Substitution> out;
  for (auto& [inst, s] : detail::satisfying_instances(fact, sitn, rules, {})) out.push_back(s.restricted_to(vars));
  return out;
}

inline bool holds(const Term& fact, const Situation& sitn, std::span<const DerivationRule> rules) {
  bool found = false;
  detail::solve_fact(fact, sitn, rules, {}, 0, [&](const Substitution&) { found = true; });
  return found;
}

// ---------------------------------------------------------------------------
// Achievement

namespace detail {

using AchieveK = std::function<void(const Substitution&, std::optional<std::size_t>)>;

inline void match_subset(std::span<const Term> body, std::size_t i, std::span<const Term> adds,
                         std::vector<bool>& used, const Substitution& s, const SubstK& k) {
  if (i == body.size()) {
    k(s);
    return;
  }
  for (std::size_t j = 0; j < adds.size(); ++j) {
    if (used[j]) continue;
    if (auto s2 = unify(body[i], adds[j], s)) {
      used[j] = true;
      match_subset(body, i + 1, adds, used, *s2, k);
      used[j] = false;
    }
  }
}

/// Direct add-list membership first, then rule-mediated achievement.
inline void achieves(std::span<const Term> adds, const Term& goal, std::span<const DerivationRule> rules,
                     const Substitution& s, const AchieveK& k) {
  for (const auto& a : adds)
    if (auto s1 = unify(goal, a, s)) k(*s1, std::nullopt);
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const auto& rule = rules[r];
    Term g = s.apply(goal);
    if (!g.is_variable() && (rule.head.name() != g.name() || rule.head.arity() != g.arity())) continue;
    Renamer rn;
    Term head = rn(rule.head);
    auto body = rn(std::span<const Term>(rule.body));
    auto s1 = unify(head, goal, s);
    if (!s1) continue;
    std::vector<bool> used(adds.size(), false);
    match_subset(body, 0, adds, used, *s1, [&](const Substitution& s2) { k(s2, r); });
  }
}

}  // namespace detail

/// Substitutions under which `event`'s add-list achieves `goal`. The caller
/// renames `event` apart from `goal` beforehand.
inline std::vector<Substitution> achieves(const EventDef& event, const Term& goal,
                                          std::span<const DerivationRule> rules) {
  auto vars = variables_of(goal);
  for (const auto& v : variables_of(event.head)) vars.insert(v);
  for (const auto& v : variables_of(event.pcs)) vars.insert(v);
  for (const auto& v : variables_of(event.adds)) vars.insert(v);
  std::vector<Substitution> out;
  detail::achieves(event.adds, goal, rules, {}, [&](const Substitution& s, std::optional<std::size_t>) {
    auto r = s.restricted_to(vars);
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(std::move(r));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Effects

/// (sitn - dels) ∪ adds. Every delete must be present.
inline Situation apply_effects(std::span<const Term> dels, std::span<const Term> adds, const Situation& sitn) {
  Situation out = sitn;
  for (const auto& d : dels)
    if (!out.erase(d)) throw MissingDeleteFact(d);
  for (const auto& a : adds) out.insert(a);
  return out;
}

/// Effects of an instance, with its ground preconditions checked first.
/// Returns the first unmet precondition instead of a situation on failure.
struct StepOutcome {
  std::optional<Situation> next;
  std::optional<Term> unmet;
};

inline StepOutcome try_step(const EventInstance& ev, const Situation& sitn, std::span<const DerivationRule> rules) {
  for (const auto& pc : ev.pcs)
    if (!holds(pc, sitn, rules)) return {std::nullopt, pc};
  for (const auto& d : ev.dels)
    if (!sitn.contains(d)) return {std::nullopt, d};
  return {apply_effects(ev.dels, ev.adds, sitn), std::nullopt};
}

/// Replay `plan` from `sitn`; nullopt when any step's preconditions fail.
inline std::optional<Situation> replay_plan(const Plan& plan, const Situation& sitn,
                                            std::span<const DerivationRule> rules) {
  Situation cur = sitn;
  for (const auto& step : plan.steps) {
    auto out = try_step(step.event, cur, rules);
    if (!out.next) return std::nullopt;
    cur = std::move(*out.next);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Plan enumeration

namespace detail {

struct RawStep {
  std::size_t def;
  Term head;
  std::vector<Term> pcs, dels, adds;
  std::map<std::string, Term> vars;  // KB variable -> renamed variable
  Term goal;
  std::optional<std::size_t> via_rule;
  std::optional<std::size_t> serves;
};

using PlanK = std::function<void(const Substitution&, const Situation&, const std::vector<RawStep>&)>;

class BackwardSearch {
 public:
  explicit BackwardSearch(const KnowledgeBase& kb) : kb_(kb) {}

  void make_plan(const Term& goal, const Situation& sit, const std::vector<Term>& stack, const Substitution& s,
                 std::size_t budget, const PlanK& k) const {
    bool satisfied_now = false;
    for (auto& [inst, s2] : satisfying_instances(goal, sit, kb_.rules, s)) {
      satisfied_now = true;
      k(s2, sit, {});
    }
    if (satisfied_now || budget == 0) return;
    for (const auto& g : stack)
      if (unifiable(goal, g, s)) return;

    std::vector<Term> next_stack = stack;
    next_stack.push_back(goal);
    for (std::size_t i = 0; i < kb_.events.size(); ++i) {
      const auto& def = kb_.events[i];
      if (def.kind != EventKind::Action) continue;
      Renamer rn;
      Term head = rn(def.head);
      auto pcs = rn(std::span<const Term>(def.pcs));
      auto dels = rn(std::span<const Term>(def.dels));
      auto adds = rn(std::span<const Term>(def.adds));
      // Template slots never introduce variables of their own (validated), so
      // the renaming map is complete here.
      achieves(adds, goal, kb_.rules, s, [&](const Substitution& s1, std::optional<std::size_t> via_rule) {
        make_plans(pcs, 0, sit, next_stack, s1, budget - 1, {},
                   [&](const Substitution& s2, const Situation& mid, const std::vector<RawStep>& pre) {
                     Situation after = mid;
                     for (const auto& d : dels) {
                       Term gd = s2.apply(d);
                       if (!gd.is_ground() || !after.erase(gd)) return;
                     }
                     for (const auto& a : adds) {
                       Term ga = s2.apply(a);
                       if (!ga.is_ground()) return;
                       after.insert(ga);
                     }
                     std::vector<RawStep> steps = pre;
                     for (auto& st : steps)
                       if (!st.serves) st.serves = steps.size();
                     steps.push_back(RawStep{i, head, pcs, dels, adds, rn.mapping(), goal, via_rule, std::nullopt});
                     k(s2, after, steps);
                   });
      });
    }
  }

 private:
  void make_plans(const std::vector<Term>& goals, std::size_t i, const Situation& sit, const std::vector<Term>& stack,
                  const Substitution& s, std::size_t budget, const std::vector<RawStep>& acc, const PlanK& k) const {
    if (i == goals.size()) {
      k(s, sit, acc);
      return;
    }
    make_plan(goals[i], sit, stack, s, budget,
              [&](const Substitution& s2, const Situation& mid, const std::vector<RawStep>& sub) {
                std::vector<RawStep> joined = acc;
                std::size_t offset = acc.size();
                for (auto st : sub) {
                  if (st.serves) *st.serves += offset;
                  joined.push_back(std::move(st));
                }
                make_plans(goals, i + 1, mid, stack, s2, budget - sub.size(), joined, k);
              });
  }

  const KnowledgeBase& kb_;
};

inline std::optional<Plan> finalize_plan(const std::vector<RawStep>& raw, const Substitution& s,
                                         const KnowledgeBase& kb) {
  Plan plan;
  plan.steps.reserve(raw.size());
  for (const auto& r : raw) {
    PlanStep step;
    step.event.def = r.def;
    step.event.kind = kb.events[r.def].kind;
    step.event.head = s.apply(r.head);
    step.event.pcs = substitute(r.pcs, s);
    step.event.dels = substitute(r.dels, s);
    step.event.adds = substitute(r.adds, s);
    for (const auto& [orig, fresh] : r.vars) {
      Term v = s.apply(fresh);
      if (!v.is_ground()) return std::nullopt;
      step.event.bindings.emplace(orig, v);
    }
    if (!step.event.head.is_ground()) return std::nullopt;
    step.achieves_goal = s.apply(r.goal);
    step.via_rule = r.via_rule;
    step.serves = r.serves;
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

/// Identity of a plan: each step's head and effects.
inline Term plan_key(const Plan& plan) {
  std::vector<Term> steps;
  for (const auto& st : plan.steps)
    steps.push_back(Term::compound("step", {st.event.head, Term::compound("del", st.event.dels),
                                            Term::compound("add", st.event.adds)}));
  return Term::compound("plan", std::move(steps));
}

}  // namespace detail

/// Every plan of length <= cfg.max_plan_length that the backward scheme
/// derives for `goal` from `sitn` and that replays soundly, duplicates
/// removed, in discovery order.
inline std::vector<Plan> enumerate_plans(const Term& goal, const Situation& sitn, const KnowledgeBase& kb,
                                         const PlannerConfig& cfg = {}) {
  std::vector<Plan> out;
  TermSet seen;
  detail::BackwardSearch search(kb);
  search.make_plan(goal, sitn, {}, {}, cfg.max_plan_length,
                   [&](const Substitution& s, const Situation&, const std::vector<detail::RawStep>& raw) {
                     auto plan = detail::finalize_plan(raw, s, kb);
                     if (!plan) return;
                     auto final_sit = replay_plan(*plan, sitn, kb.rules);
                     if (!final_sit || !holds(s.apply(goal), *final_sit, kb.rules)) return;
                     if (seen.insert(detail::plan_key(*plan)).second) out.push_back(std::move(*plan));
                   });
  return out;
}

// ---------------------------------------------------------------------------
// Scoring and selection

/// "appendix": 100 - 10 * length - (1 if the plan evacuates, else 0).
/// "constant": every plan scores the same (the unranked ablation).
inline int plan_quality(const Plan& plan, const std::string& scorer = "appendix") {
  if (scorer == "appendix") {
    bool evacuates = std::any_of(plan.steps.begin(), plan.steps.end(),
                                 [](const PlanStep& s) { return s.event.head.name() == "evacuate"; });
    return 100 - 10 * static_cast<int>(plan.size()) - (evacuates ? 1 : 0);
  }
  if (scorer == "constant") return 0;
  throw UnknownScorer(scorer);
}

inline bool is_known_scorer(const std::string& name) { return name == "appendix" || name == "constant"; }

/// Orders scored plans by quality, then by compare_terms on `plan(...)`, then
/// by effects. The best plan is the maximum.
inline int compare_scored(const ScoredPlan& a, const ScoredPlan& b) {
  if (a.quality != b.quality) return a.quality < b.quality ? -1 : 1;
  if (int c = compare_terms(a.plan.as_term(), b.plan.as_term()); c != 0) return c;
  return compare_terms(detail::plan_key(a.plan), detail::plan_key(b.plan));
}

inline std::vector<ScoredPlan> score_plans(std::vector<Plan> plans, const std::string& scorer) {
  if (!is_known_scorer(scorer)) throw UnknownScorer(scorer);
  std::vector<ScoredPlan> out;
  out.reserve(plans.size());
  for (auto& p : plans) {
    int q = plan_quality(p, scorer);
    out.push_back({std::move(p), q});
  }
  return out;
}

inline ScoredPlan make_best_plan(const Term& goal, const Situation& sitn, const KnowledgeBase& kb,
                                 const PlannerConfig& cfg = {}) {
  auto scored = score_plans(enumerate_plans(goal, sitn, kb, cfg), cfg.scorer);
  if (scored.empty()) throw NoPlanFound(goal);
  auto best = std::max_element(scored.begin(), scored.end(),
                               [](const ScoredPlan& a, const ScoredPlan& b) { return compare_scored(a, b) < 0; });
  return std::move(*best);
}

}  // namespace talespin
