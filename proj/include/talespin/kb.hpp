#pragma once
//
// Knowledge-base data model: STRIPS event schemas, derivation rules, goal
// revision rules, text templates, situations and grammars.
//

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "talespin/term.hpp"

namespace talespin {

enum class EventKind { Action, Happening };

inline const char* to_string(EventKind k) { return k == EventKind::Action ? "action" : "happening"; }

/// Fill-in-the-blank text: literal runs and `{Var}` slots.
struct TextTemplate {
  struct Literal {
    std::string text;
    friend bool operator==(const Literal&, const Literal&) = default;
  };
  struct Slot {
    std::string variable;
    friend bool operator==(const Slot&, const Slot&) = default;
  };
  using Segment = std::variant<Literal, Slot>;

  std::vector<Segment> segments;

  std::vector<std::string> slot_variables() const {
    std::vector<std::string> out;
    for (const auto& s : segments)
      if (const auto* slot = std::get_if<Slot>(&s)) out.push_back(slot->variable);
    return out;
  }

  friend bool operator==(const TextTemplate&, const TextTemplate&) = default;
};

struct EventDef {
  EventKind kind = EventKind::Action;
  Term head;
  std::vector<Term> pcs;
  std::vector<Term> dels;
  std::vector<Term> adds;
  TextTemplate text;

  friend bool operator==(const EventDef&, const EventDef&) = default;
};

/// `head :- body` where `head` holds whenever every body fact does.
struct DerivationRule {
  Term head;
  std::vector<Term> body;

  friend bool operator==(const DerivationRule&, const DerivationRule&) = default;
};

/// If `trigger` holds and the current goal matches `old_goal`, adopt
/// `new_goal`. Rules are tried in declaration order; the first match wins.
struct RevisionRule {
  Term old_goal;
  Term trigger;
  Term new_goal;

  friend bool operator==(const RevisionRule&, const RevisionRule&) = default;
};

/// A set of ground facts. Iteration order is compare_terms order.
class Situation {
 public:
  Situation() = default;
  Situation(std::initializer_list<Term> facts) {
    for (const auto& f : facts) insert(f);
  }
  explicit Situation(std::span<const Term> facts) {
    for (const auto& f : facts) insert(f);
  }

  void insert(const Term& fact) { facts_.insert(fact); }
  bool erase(const Term& fact) { return facts_.erase(fact) > 0; }
  bool contains(const Term& fact) const { return facts_.count(fact) > 0; }
  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }

  auto begin() const { return facts_.begin(); }
  auto end() const { return facts_.end(); }

  std::vector<Term> facts() const { return {facts_.begin(), facts_.end()}; }

  friend bool operator==(const Situation& a, const Situation& b) {
    if (a.size() != b.size()) return false;
    auto ib = b.facts_.begin();
    for (const auto& f : a.facts_) {
      if (!(f == *ib)) return false;
      ++ib;
    }
    return true;
  }

  friend int compare(const Situation& a, const Situation& b) {
    auto ia = a.facts_.begin();
    auto ib = b.facts_.begin();
    for (; ia != a.facts_.end() && ib != b.facts_.end(); ++ia, ++ib)
      if (int c = compare_terms(*ia, *ib); c != 0) return c;
    if (a.size() == b.size()) return 0;
    return a.size() < b.size() ? -1 : 1;
  }

  std::string str() const {
    std::string out = "{";
    bool first = true;
    for (const auto& f : facts_) {
      if (!first) out += ", ";
      first = false;
      f.append_to(out);
    }
    return out + "}";
  }

 private:
  TermSet facts_;
};

struct SituationLess {
  bool operator()(const Situation& a, const Situation& b) const { return compare(a, b) < 0; }
};

/// Story-grammar production: `head --> body`. A body item is a nonterminal
/// reference or a terminal list `[a, b]`.
struct Production {
  struct Terminals {
    std::vector<std::string> words;
    friend bool operator==(const Terminals&, const Terminals&) = default;
  };
  using Item = std::variant<Term, Terminals>;

  Term head;
  std::vector<Item> body;

  friend bool operator==(const Production&, const Production&) = default;
};

struct Grammar {
  std::vector<Production> productions;

  bool defines(const Term& nonterminal) const {
    for (const auto& p : productions)
      if (p.head.name() == nonterminal.name() && p.head.arity() == nonterminal.arity()) return true;
    return false;
  }

  friend bool operator==(const Grammar&, const Grammar&) = default;
};

struct KnowledgeBase {
  std::vector<EventDef> events;
  std::vector<DerivationRule> rules;
  std::vector<RevisionRule> revisions;
  Situation init;
  std::optional<Term> goal;
  std::vector<Grammar> grammars;

  std::size_t count(EventKind kind) const {
    std::size_t n = 0;
    for (const auto& e : events) n += e.kind == kind;
    return n;
  }

  /// Index of the definition whose head has `head`'s functor and arity and
  /// the requested kind (any kind when nullopt).
  std::optional<std::size_t> find_event(const Term& head, std::optional<EventKind> kind = std::nullopt) const {
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& e = events[i];
      if (kind && e.kind != *kind) continue;
      if (e.head.name() == head.name() && e.head.arity() == head.arity()) return i;
    }
    return std::nullopt;
  }

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

}  // namespace talespin
