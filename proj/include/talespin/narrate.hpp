#pragma once
//
// Text rendering of traces and "why" explanations built from the recorded
// plan justifications.
//

#include <string>
#include <vector>

#include "talespin/kb.hpp"
#include "talespin/simulator.hpp"

namespace talespin {

class UnknownEvent : public Error {
 public:
  explicit UnknownEvent(const Term& ev) : Error("no event definition for " + ev.str()) {}
};

class UnboundSlot : public Error {
 public:
  UnboundSlot(const std::string& slot, const Term& ev)
      : Error("template slot {" + slot + "} of " + ev.str() + " is unbound") {}
};

class IndexOutOfRange : public Error {
 public:
  IndexOutOfRange(std::size_t index, std::size_t size)
      : Error("step " + std::to_string(index) + " is out of range (trace has " + std::to_string(size) + " steps)") {}
};

/// Atoms render as their bare name; compounds in canonical syntax.
inline std::string render_value(const Term& t) { return t.str(); }

inline std::string render_template(const TextTemplate& tmpl, const std::map<std::string, Term>& bindings,
                                   const Term& event) {
  std::string out;
  for (const auto& seg : tmpl.segments) {
    if (const auto* lit = std::get_if<TextTemplate::Literal>(&seg)) {
      out += lit->text;
      continue;
    }
    const auto& var = std::get<TextTemplate::Slot>(seg).variable;
    auto it = bindings.find(var);
    if (it == bindings.end() || !it->second.is_ground()) throw UnboundSlot(var, event);
    out += render_value(it->second);
  }
  return out;
}

/// Render a bare event term; slots must be bound by the event's head.
inline std::string render_event(const Term& event, const KnowledgeBase& kb) {
  auto idx = kb.find_event(event);
  if (!idx) throw UnknownEvent(event);
  const auto& def = kb.events[*idx];
  auto s = unify(def.head, event);
  if (!s) throw UnknownEvent(event);
  std::map<std::string, Term> bindings;
  for (const auto& v : variables_of(def.head)) bindings.emplace(v, s->apply(Term::variable(v)));
  return render_template(def.text, bindings, event);
}

/// Render an executed event using the bindings captured when it ran.
inline std::string render_event(const EventInstance& event, const KnowledgeBase& kb) {
  if (event.def >= kb.events.size()) throw UnknownEvent(event.head);
  return render_template(kb.events[event.def].text, event.bindings, event.head);
}

enum class StoryStyle { Plain, Appendix };

inline std::vector<std::string> story_lines(const Trace& trace, const KnowledgeBase& kb) {
  std::vector<std::string> out;
  out.reserve(trace.steps.size());
  for (const auto& st : trace.steps) out.push_back(render_event(st.event, kb));
  return out;
}

/// One line per step. Appendix style opens with "Once upon a time..." and
/// indents each line by seven spaces.
inline std::string render_story(const Trace& trace, const KnowledgeBase& kb, StoryStyle style = StoryStyle::Plain) {
  std::string out;
  if (style == StoryStyle::Appendix) out += "Once upon a time...\n";
  for (const auto& line : story_lines(trace, kb)) {
    if (style == StoryStyle::Appendix) out += "       ";
    out += line + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Explanations

struct Explanation {
  enum class Role { TopGoal, PreconditionOf, RevisedAfter, Exogenous };

  struct Link {
    Term goal;
    Role role = Role::TopGoal;
    /// The action served (PreconditionOf) or the revision trigger (RevisedAfter).
    std::optional<Term> about;

    friend bool operator==(const Link&, const Link&) = default;
  };

  std::size_t step = 0;
  Term event;
  std::vector<Link> chain;

  bool exogenous() const { return !chain.empty() && chain.front().role == Role::Exogenous; }
};

/// Why step `step_index` happened. Actions walk their justification from
/// the subgoal they achieved up through the preconditions it enabled to the
/// goal that was active when they ran; happenings are exogenous.
inline Explanation explain(const Trace& trace, std::size_t step_index) {
  if (step_index >= trace.steps.size()) throw IndexOutOfRange(step_index, trace.steps.size());
  const auto& st = trace.steps[step_index];
  Explanation ex;
  ex.step = step_index;
  ex.event = st.term();
  if (!st.justification) {
    ex.chain.push_back({st.term(), Explanation::Role::Exogenous, std::nullopt});
    return ex;
  }
  const auto& adopted = trace.plans.at(st.justification->plan);
  const auto& steps = adopted.plan.plan.steps;
  std::size_t cur = st.justification->step;
  for (;;) {
    const auto& ps = steps.at(cur);
    if (ps.serves) {
      ex.chain.push_back({ps.achieves_goal, Explanation::Role::PreconditionOf, steps.at(*ps.serves).action()});
      cur = *ps.serves;
      continue;
    }
    const auto& entry = trace.goal_history.at(adopted.goal);
    if (entry.trigger)
      ex.chain.push_back({ps.achieves_goal, Explanation::Role::RevisedAfter, entry.trigger});
    else
      ex.chain.push_back({ps.achieves_goal, Explanation::Role::TopGoal, std::nullopt});
    break;
  }
  return ex;
}

/// Indented "because" lines, one per link.
inline std::string format_explanation(const Explanation& ex) {
  std::string out = "step " + std::to_string(ex.step) + ": " + ex.event.str() + "\n";
  for (const auto& link : ex.chain) {
    out += "  because ";
    switch (link.role) {
      case Explanation::Role::Exogenous:
        out += "it happened: " + link.goal.str() + " is an external event, not a choice of the agent";
        break;
      case Explanation::Role::PreconditionOf:
        out += "it achieves " + link.goal.str() + ", a precondition of " + link.about->str();
        break;
      case Explanation::Role::TopGoal:
        out += "it achieves " + link.goal.str() + ", the agent's goal";
        break;
      case Explanation::Role::RevisedAfter:
        out += "it achieves " + link.goal.str() + ", the goal adopted after " + link.about->str();
        break;
    }
    out += "\n";
  }
  return out;
}

}  // namespace talespin
