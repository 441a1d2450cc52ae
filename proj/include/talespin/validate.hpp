#pragma once

#include <map>
#include <set>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "talespin/kb.hpp"
#include "talespin/syntax.hpp"

namespace talespin {

namespace detail {

inline std::string join_names(const std::set<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

inline std::set<std::string> missing_from(const std::set<std::string>& vars, const std::set<std::string>& bound) {
  std::set<std::string> out;
  for (const auto& v : vars)
    if (!bound.count(v)) out.insert(v);
  return out;
}

using Signature = std::pair<std::string, std::size_t>;

inline Signature signature(const Term& t) { return {t.name(), t.arity()}; }

}  // namespace detail

/// Static checks over a parsed knowledge base. Errors break the guarantee
/// that every planned or executed event is fully instantiated; warnings flag
/// definitions that can never take part in a story.
///
/// Diagnostics carry no source location (line 0) since the model does not
/// keep one; callers print them against the file name.
inline std::vector<Diagnostic> validate_kb(const KnowledgeBase& kb) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string msg) { out.push_back({Severity::Error, {0, 0}, std::move(msg)}); };
  auto warning = [&](std::string msg) { out.push_back({Severity::Warning, {0, 0}, std::move(msg)}); };

  std::set<std::tuple<std::string, std::size_t, EventKind>> heads;
  for (const auto& e : kb.events) {
    std::string where = std::string(to_string(e.kind)) + " " + e.head.str();
    if (!heads.insert({e.head.name(), e.head.arity(), e.kind}).second)
      error(where + ": duplicate definition of " + e.head.name() + "/" + std::to_string(e.head.arity()));

    std::set<std::string> bound = variables_of(e.head);
    for (const auto& v : variables_of(e.pcs)) bound.insert(v);
    if (auto m = detail::missing_from(variables_of(e.dels), bound); !m.empty())
      error(where + ": uninstantiated delete: variable(s) " + detail::join_names(m) +
            " appear in neither the head nor the preconditions");
    if (auto m = detail::missing_from(variables_of(e.adds), bound); !m.empty())
      error(where + ": uninstantiated add: variable(s) " + detail::join_names(m) +
            " appear in neither the head nor the preconditions");
    auto slots = e.text.slot_variables();
    if (auto m = detail::missing_from({slots.begin(), slots.end()}, bound); !m.empty())
      error(where + ": unbound template slot(s) " + detail::join_names(m));
  }

  for (const auto& r : kb.rules) {
    if (r.head.is_variable()) {
      error("rule " + r.head.str() + ": head must not be a variable");
      continue;
    }
    if (auto m = detail::missing_from(variables_of(r.head), variables_of(r.body)); !m.empty())
      error("rule " + r.head.str() + ": head variable(s) " + detail::join_names(m) + " do not occur in the body");
  }

  for (const auto& r : kb.revisions) {
    auto bound = variables_of(r.old_goal);
    for (const auto& v : variables_of(r.trigger)) bound.insert(v);
    if (auto m = detail::missing_from(variables_of(r.new_goal), bound); !m.empty())
      error("revise " + r.old_goal.str() + ": new goal variable(s) " + detail::join_names(m) +
            " occur in neither the old goal nor the trigger");
  }

  for (const auto& f : kb.init)
    if (!f.is_ground()) error("init fact " + f.str() + " is not ground");
  if (kb.goal && !kb.goal->is_ground()) error("goal " + kb.goal->str() + " is a pattern; the top-level goal must be ground");

  // Anything a situation can ever contain or derive.
  std::set<detail::Signature> producible;
  for (const auto& f : kb.init) producible.insert(detail::signature(f));
  for (const auto& e : kb.events)
    for (const auto& a : e.adds) producible.insert(detail::signature(a));
  for (const auto& r : kb.rules) producible.insert(detail::signature(r.head));

  for (const auto& e : kb.events) {
    if (e.kind != EventKind::Happening) continue;
    for (const auto& pc : e.pcs)
      if (!producible.count(detail::signature(pc)))
        warning("happening " + e.head.str() + ": precondition " + pc.str() +
                " can never be satisfied (no fact, effect or rule produces " + pc.name() + "/" +
                std::to_string(pc.arity()) + ")");
  }

  // Facts some goal, precondition, rule body or revision can consume.
  std::vector<Term> consumers;
  if (kb.goal) consumers.push_back(*kb.goal);
  for (const auto& e : kb.events) consumers.insert(consumers.end(), e.pcs.begin(), e.pcs.end());
  for (const auto& r : kb.rules) consumers.insert(consumers.end(), r.body.begin(), r.body.end());
  for (const auto& r : kb.revisions) {
    consumers.push_back(r.new_goal);
    consumers.push_back(r.trigger);
  }
  for (const auto& e : kb.events) {
    if (e.kind != EventKind::Action) continue;
    bool useful = false;
    for (const auto& a : e.adds)
      for (const auto& c : consumers)
        if (!useful && unifiable(rename_fresh(a), rename_fresh(c))) useful = true;
    if (!useful) warning("action " + e.head.str() + " is unreachable: none of its effects is used by any goal or rule");
  }
  return out;
}

}  // namespace talespin
