#pragma once
//
// Story-grammar baseline: expands DCG-style productions into word sequences.
//

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "talespin/kb.hpp"
#include "talespin/rng.hpp"

namespace talespin {

class UnknownNonterminal : public Error {
 public:
  explicit UnknownNonterminal(const Term& symbol)
      : Error("no production for " + symbol.name() + "/" + std::to_string(symbol.arity())) {}
};

class DepthExceeded : public Error {
 public:
  DepthExceeded(const Term& symbol, std::size_t max_depth)
      : Error("expanding " + symbol.str() + " exceeds depth " + std::to_string(max_depth)) {}
};

/// Result of one expansion. `dead_end` names the nonterminal instance that
/// had no unifying production; `words` then holds the prefix produced so far.
struct Expansion {
  std::vector<std::string> words;
  std::optional<Term> dead_end;

  bool complete() const { return !dead_end; }
};

/// Picks one of `n` alternatives.
using Chooser = std::function<std::size_t(std::size_t n)>;

namespace detail {

struct PendingItem {
  Production::Item item;
  std::size_t depth;
};

/// Productions (renamed apart) whose head unifies with `goal`, in file order.
inline std::vector<std::pair<Production, Substitution>> matching_productions(const Grammar& g, const Term& goal,
                                                                              const Substitution& s) {
  std::vector<std::pair<Production, Substitution>> out;
  for (const auto& p : g.productions) {
    if (p.head.name() != goal.name() || p.head.arity() != goal.arity()) continue;
    Renamer rn;
    Production fresh{rn(p.head), {}};
    for (const auto& it : p.body) {
      if (const auto* nt = std::get_if<Term>(&it))
        fresh.body.emplace_back(rn(*nt));
      else
        fresh.body.push_back(it);
    }
    if (auto s2 = unify(fresh.head, goal, s)) out.emplace_back(std::move(fresh), std::move(*s2));
  }
  return out;
}

inline void push_body(std::vector<PendingItem>& stack, const Production& p, std::size_t depth) {
  for (auto it = p.body.rbegin(); it != p.body.rend(); ++it) stack.push_back({*it, depth});
}

}  // namespace detail

/// Leftmost depth-first expansion of `symbol`, committing to whichever
/// alternative `choose` picks. Nonterminal parameters are unified, so a
/// choice made early (problem(P)) constrains later ones (response(P)).
inline Expansion expand(const Grammar& g, const Term& symbol, const Chooser& choose, std::size_t max_depth = 32) {
  if (!g.defines(symbol)) throw UnknownNonterminal(symbol);
  Expansion out;
  Substitution s;
  std::vector<detail::PendingItem> stack{{symbol, 1}};
  while (!stack.empty()) {
    auto [item, depth] = std::move(stack.back());
    stack.pop_back();
    if (const auto* ts = std::get_if<Production::Terminals>(&item)) {
      out.words.insert(out.words.end(), ts->words.begin(), ts->words.end());
      continue;
    }
    Term goal = s.apply(std::get<Term>(item));
    if (depth > max_depth) throw DepthExceeded(goal, max_depth);
    auto alts = detail::matching_productions(g, goal, s);
    if (alts.empty()) {
      out.dead_end = goal;
      return out;
    }
    std::size_t pick = choose(alts.size());
    s = std::move(alts.at(pick).second);
    detail::push_body(stack, alts[pick].first, depth + 1);
  }
  return out;
}

/// Sampling expansion; `rng` advances by one draw per choice point.
inline Expansion expand(const Grammar& g, const Term& symbol, RngState& rng, std::size_t max_depth = 32) {
  return expand(
      g, symbol,
      [&](std::size_t n) {
        auto [idx, next] = rnd_index(n, rng);
        rng = next;
        return idx;
      },
      max_depth);
}

inline Expansion expand_first(const Grammar& g, const Term& symbol, std::size_t max_depth = 32) {
  return expand(g, symbol, [](std::size_t) { return std::size_t{0}; }, max_depth);
}

struct Enumeration {
  std::vector<std::vector<std::string>> sequences;  // complete, duplicate-free, in discovery order
  std::vector<Term> dead_ends;                      // distinct nonterminal instances that had no production
  bool truncated = false;                           // some branch was cut at max_depth
};

/// Every complete expansion reachable within `max_depth` nested expansions.
inline Enumeration enumerate_expansions(const Grammar& g, const Term& symbol, std::size_t max_depth = 16) {
  if (!g.defines(symbol)) throw UnknownNonterminal(symbol);
  Enumeration out;
  std::set<std::vector<std::string>> seen;
  TermSet dead;

  std::function<void(std::vector<detail::PendingItem>, const Substitution&, std::vector<std::string>)> go =
      [&](std::vector<detail::PendingItem> stack, const Substitution& s, std::vector<std::string> words) {
        while (!stack.empty() && std::holds_alternative<Production::Terminals>(stack.back().item)) {
          const auto& ws = std::get<Production::Terminals>(stack.back().item).words;
          words.insert(words.end(), ws.begin(), ws.end());
          stack.pop_back();
        }
        if (stack.empty()) {
          if (seen.insert(words).second) out.sequences.push_back(std::move(words));
          return;
        }
        auto [item, depth] = stack.back();
        stack.pop_back();
        Term goal = s.apply(std::get<Term>(item));
        if (depth > max_depth) {
          out.truncated = true;
          return;
        }
        auto alts = detail::matching_productions(g, goal, s);
        if (alts.empty()) {
          if (dead.insert(goal).second) out.dead_ends.push_back(goal);
          return;
        }
        for (auto& [p, s2] : alts) {
          auto next = stack;
          detail::push_body(next, p, depth + 1);
          go(std::move(next), s2, words);
        }
      };
  go({{symbol, 1}}, {}, {});
  return out;
}

}  // namespace talespin
