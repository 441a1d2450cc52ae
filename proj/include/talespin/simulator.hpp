#pragma once
//
// World simulator: executes a plan one step at a time, occasionally injects
// a happening, revises the agent's goal, replans, and records the incident.
//

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "talespin/kb.hpp"
#include "talespin/planner.hpp"
#include "talespin/rng.hpp"

namespace talespin {

/// Force `happening` to occur as trace step `step` (0-based).
struct Injection {
  std::size_t step = 0;
  Term happening;

  friend bool operator==(const Injection&, const Injection&) = default;
};

struct SimConfig {
  double happening_prob = 0.3;
  std::size_t max_happenings = 1;
  RngState rng;
  std::vector<Injection> injection_schedule;
  PlannerConfig planner;
};

struct Justification {
  std::size_t plan = 0;  // index into Trace::plans
  std::size_t step = 0;  // index into that plan's steps

  friend bool operator==(const Justification&, const Justification&) = default;
};

struct TraceStep {
  EventInstance event;
  Situation pre;
  Situation post;
  std::optional<Justification> justification;  // actions only

  EventKind kind() const { return event.kind; }
  const Term& term() const { return event.head; }

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

/// Goal adopted before trace step `step`; `trigger` is set for revisions.
struct GoalEntry {
  std::size_t step = 0;
  Term goal;
  std::optional<Term> trigger;

  friend bool operator==(const GoalEntry&, const GoalEntry&) = default;
};

/// Plan adopted before trace step `step`, in pursuit of goal_history[goal].
struct AdoptedPlan {
  std::size_t step = 0;
  ScoredPlan plan;
  std::size_t goal = 0;

  friend bool operator==(const AdoptedPlan&, const AdoptedPlan&) = default;
};

struct Trace {
  Situation initial;
  std::vector<TraceStep> steps;
  std::vector<GoalEntry> goal_history;
  /// plans[0] is the initial plan; later entries are replans.
  std::vector<AdoptedPlan> plans;

  const Situation& final_situation() const { return steps.empty() ? initial : steps.back().post; }
  const GoalEntry& final_goal() const { return goal_history.back(); }

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Failure during execution; carries the trace up to the failure.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, Trace partial) : Error(what), partial_(std::move(partial)) {}
  const Trace& partial_trace() const { return partial_; }

 private:
  Trace partial_;
};

class PreconditionViolation : public SimulationError {
 public:
  PreconditionViolation(const Term& action, const Term& missing, std::size_t step, Trace partial)
      : SimulationError("step " + std::to_string(step) + ": precondition " + missing.str() + " of " + action.str() +
                            " does not hold (stale plan)",
                        std::move(partial)),
        action_(action),
        missing_(missing) {}
  const Term& action() const { return action_; }
  const Term& missing() const { return missing_; }

 private:
  Term action_;
  Term missing_;
};

class UnresolvableIncident : public SimulationError {
 public:
  UnresolvableIncident(const Term& goal, std::size_t step, Trace partial)
      : SimulationError("unresolvable incident: no plan for revised goal " + goal.str() + " after step " +
                            std::to_string(step),
                        std::move(partial)) {}
};

class InjectionError : public SimulationError {
 public:
  InjectionError(const Term& happening, std::size_t step, Trace partial)
      : SimulationError("scheduled happening " + happening.str() + " is not applicable at step " +
                            std::to_string(step),
                        std::move(partial)) {}
};

// ---------------------------------------------------------------------------

namespace detail {

inline EventInstance instantiate(const KnowledgeBase& kb, std::size_t def_index, const Renamer& rn,
                                 const Term& head, std::span<const Term> pcs, std::span<const Term> dels,
                                 std::span<const Term> adds, const Substitution& s) {
  EventInstance ev;
  ev.def = def_index;
  ev.kind = kb.events[def_index].kind;
  ev.head = s.apply(head);
  ev.pcs = substitute(pcs, s);
  ev.dels = substitute(dels, s);
  ev.adds = substitute(adds, s);
  for (const auto& [orig, fresh] : rn.mapping()) ev.bindings.emplace(orig, s.apply(fresh));
  return ev;
}

inline Term instance_key(const EventInstance& ev) {
  std::vector<Term> binds;
  for (const auto& [k, v] : ev.bindings) binds.push_back(Term::compound("b", {Term::atom(k), v}));
  return Term::compound("event", {ev.head, Term::compound("bindings", std::move(binds))});
}

}  // namespace detail

/// Every ground instantiation of every `kind` event whose preconditions hold
/// in `sitn`: declaration order, then term order within one definition.
inline std::vector<EventInstance> applicable_events(const Situation& sitn, const KnowledgeBase& kb, EventKind kind) {
  std::vector<EventInstance> out;
  for (std::size_t i = 0; i < kb.events.size(); ++i) {
    const auto& def = kb.events[i];
    if (def.kind != kind) continue;
    Renamer rn;
    Term head = rn(def.head);
    auto pcs = rn(std::span<const Term>(def.pcs));
    auto dels = rn(std::span<const Term>(def.dels));
    auto adds = rn(std::span<const Term>(def.adds));
    std::vector<std::pair<Term, EventInstance>> found;
    TermSet seen;
    detail::solve_facts(pcs, 0, sitn, kb.rules, {}, 0, [&](const Substitution& s) {
      auto ev = detail::instantiate(kb, i, rn, head, pcs, dels, adds, s);
      if (!ev.head.is_ground()) return;
      Term key = detail::instance_key(ev);
      if (seen.insert(key).second) found.emplace_back(key, std::move(ev));
    });
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return compare_terms(a.first, b.first) < 0; });
    for (auto& [key, ev] : found) out.push_back(std::move(ev));
  }
  return out;
}

inline std::vector<EventInstance> applicable_happenings(const Situation& sitn, const KnowledgeBase& kb) {
  return applicable_events(sitn, kb, EventKind::Happening);
}

struct Revision {
  Term goal;
  std::optional<Term> trigger;  // empty when no rule fired
};

/// First revision rule (declaration order) whose old-goal pattern matches
/// `goal` and whose trigger holds in `sitn`; otherwise `goal` is kept.
inline Revision revise_goal(const Situation& sitn, const Term& goal, const KnowledgeBase& kb) {
  for (const auto& rule : kb.revisions) {
    Renamer rn;
    Term old_goal = rn(rule.old_goal);
    Term trigger = rn(rule.trigger);
    Term new_goal = rn(rule.new_goal);
    auto s = unify(old_goal, goal);
    if (!s) continue;
    auto insts = detail::satisfying_instances(trigger, sitn, kb.rules, *s);
    if (insts.empty()) continue;
    const auto& s2 = insts.front().second;
    return {s2.apply(new_goal), s2.apply(trigger)};
  }
  return {goal, std::nullopt};
}

/// Run `plan` from `sitn`. `cfg.rng` is advanced in place so that callers can
/// continue one random stream across several incidents.
inline Trace execute_plan(const ScoredPlan& plan, const Situation& sitn, const Term& goal, SimConfig& cfg,
                          const KnowledgeBase& kb) {
  Trace tr;
  tr.initial = sitn;
  tr.goal_history.push_back({0, goal, std::nullopt});
  tr.plans.push_back({0, plan, 0});

  Term current_goal = goal;
  Situation cur = sitn;
  std::size_t active = 0;
  std::size_t cursor = 0;
  std::size_t remaining = cfg.max_happenings;

  while (cursor < tr.plans[active].plan.plan.size()) {
    const std::size_t idx = tr.steps.size();
    std::optional<EventInstance> happening;

    if (remaining > 0) {
      const Injection* scheduled = nullptr;
      for (const auto& inj : cfg.injection_schedule)
        if (inj.step == idx) {
          scheduled = &inj;
          break;
        }
      if (scheduled) {
        for (auto& cand : applicable_happenings(cur, kb))
          if (unifiable(scheduled->happening, cand.head)) {
            happening = std::move(cand);
            break;
          }
        if (!happening) throw InjectionError(scheduled->happening, idx, tr);
      } else {
        auto [fire, after_draw] = maybe(cfg.happening_prob, cfg.rng);
        cfg.rng = after_draw;
        if (fire) {
          auto candidates = applicable_happenings(cur, kb);
          if (!candidates.empty()) {
            auto [pick, after_pick] = rnd_index(candidates.size(), cfg.rng);
            cfg.rng = after_pick;
            happening = std::move(candidates[pick]);
          }
        }
      }
    }

    if (happening) {
      Situation post = apply_effects(happening->dels, happening->adds, cur);
      tr.steps.push_back({std::move(*happening), cur, post, std::nullopt});
      cur = std::move(post);
      --remaining;
      auto rev = revise_goal(cur, current_goal, kb);
      if (rev.trigger && !(rev.goal == current_goal)) {
        current_goal = rev.goal;
        tr.goal_history.push_back({idx + 1, current_goal, rev.trigger});
      }
      ScoredPlan replanned;
      try {
        replanned = make_best_plan(current_goal, cur, kb, cfg.planner);
      } catch (const NoPlanFound&) {
        throw UnresolvableIncident(current_goal, idx, tr);
      }
      tr.plans.push_back({idx + 1, std::move(replanned), tr.goal_history.size() - 1});
      active = tr.plans.size() - 1;
      cursor = 0;
      continue;
    }

    const PlanStep& step = tr.plans[active].plan.plan.steps[cursor];
    auto outcome = try_step(step.event, cur, kb.rules);
    if (!outcome.next) throw PreconditionViolation(step.action(), *outcome.unmet, idx, tr);
    tr.steps.push_back({step.event, cur, *outcome.next, Justification{active, cursor}});
    cur = std::move(*outcome.next);
    ++cursor;
  }
  return tr;
}

/// Plan for the KB's goal from its initial situation, then simulate.
inline Trace generate_incident(const KnowledgeBase& kb, SimConfig& cfg) {
  if (!kb.goal) throw Error("knowledge base declares no goal");
  ScoredPlan initial = make_best_plan(*kb.goal, kb.init, kb, cfg.planner);
  return execute_plan(initial, kb.init, *kb.goal, cfg, kb);
}

}  // namespace talespin
