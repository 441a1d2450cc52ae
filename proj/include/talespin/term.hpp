#pragma once
//
// First-order terms: variables, atoms and compounds, plus unification with
// occurs-check, substitution, a total term order, and fresh renaming.
//
// Canonical syntax is Prolog-like: `functor(arg1,arg2)`, lowercase atoms,
// capitalised or `_`-prefixed variables.
//

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace talespin {

/// Base class for every error the engine reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Term {
 public:
  enum class Kind : std::uint8_t { Variable, Atom, Compound };

  Term() : Term(atom("nil")) {}

  static Term variable(std::string name) {
    return Term(std::make_shared<const Node>(Kind::Variable, std::move(name), std::vector<Term>{}, false));
  }
  static Term atom(std::string name) {
    return Term(std::make_shared<const Node>(Kind::Atom, std::move(name), std::vector<Term>{}, true));
  }
  /// An empty argument list yields an atom; compounds always have arity >= 1.
  static Term compound(std::string functor, std::vector<Term> args) {
    if (args.empty()) return atom(std::move(functor));
    bool ground = true;
    for (const auto& a : args) ground = ground && a.is_ground();
    return Term(std::make_shared<const Node>(Kind::Compound, std::move(functor), std::move(args), ground));
  }

  Kind kind() const { return node_->kind; }
  bool is_variable() const { return node_->kind == Kind::Variable; }
  bool is_atom() const { return node_->kind == Kind::Atom; }
  bool is_compound() const { return node_->kind == Kind::Compound; }
  bool is_ground() const { return node_->ground; }

  /// Variable name, atom name, or compound functor.
  const std::string& name() const { return node_->name; }
  std::span<const Term> args() const { return node_->args; }
  std::size_t arity() const { return node_->args.size(); }
  const Term& arg(std::size_t i) const { return node_->args.at(i); }

  bool same_node(const Term& other) const { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.name() != b.name() || a.arity() != b.arity()) return false;
    for (std::size_t i = 0; i < a.arity(); ++i)
      if (!(a.node_->args[i] == b.node_->args[i])) return false;
    return true;
  }

  /// Canonical text form, e.g. `alocation(airplane1,runway(seattle))`.
  std::string str() const {
    std::string out;
    append_to(out);
    return out;
  }

  void append_to(std::string& out) const {
    out += name();
    if (is_compound()) {
      out += '(';
      for (std::size_t i = 0; i < arity(); ++i) {
        if (i) out += ',';
        node_->args[i].append_to(out);
      }
      out += ')';
    }
  }

 private:
  struct Node {
    Node(Kind k, std::string n, std::vector<Term> a, bool g)
        : kind(k), name(std::move(n)), args(std::move(a)), ground(g) {}
    Kind kind;
    std::string name;
    std::vector<Term> args;
    bool ground;
  };

  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

inline std::ostream& operator<<(std::ostream& os, const Term& t) { return os << t.str(); }

// ---------------------------------------------------------------------------
// Total order

/// Variable < Atom < Compound; atoms and variables by name; compounds by
/// arity, then functor, then arguments left to right.
inline int compare_terms(const Term& a, const Term& b) {
  if (a.same_node(b)) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  if (a.is_compound() && a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
  if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (int c = compare_terms(a.arg(i), b.arg(i)); c != 0) return c;
  return 0;
}

struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compare_terms(a, b) < 0; }
};

using TermSet = std::set<Term, TermLess>;

/// Lexicographic comparison of term sequences under compare_terms; a proper
/// prefix orders first.
inline int compare_term_lists(std::span<const Term> a, std::span<const Term> b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
    if (int c = compare_terms(a[i], b[i]); c != 0) return c;
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

// ---------------------------------------------------------------------------
// Variables

inline void collect_variables(const Term& t, std::set<std::string>& out) {
  if (t.is_ground()) return;
  if (t.is_variable()) {
    out.insert(t.name());
    return;
  }
  for (const auto& a : t.args()) collect_variables(a, out);
}

inline std::set<std::string> variables_of(const Term& t) {
  std::set<std::string> out;
  collect_variables(t, out);
  return out;
}

inline std::set<std::string> variables_of(std::span<const Term> ts) {
  std::set<std::string> out;
  for (const auto& t : ts) collect_variables(t, out);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

/// Triangular substitution: bindings may refer to other bound variables;
/// `resolve` and `apply` chase them. Binding goes through `bind`, which
/// enforces the occurs-check, so every chain terminates.
class Substitution {
 public:
  using Map = std::map<std::string, Term, std::less<>>;

  Substitution() = default;

  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const Map& bindings() const { return bindings_; }

  const Term* lookup(std::string_view var) const {
    auto it = bindings_.find(var);
    return it == bindings_.end() ? nullptr : &it->second;
  }

  /// Follow variable-to-variable chains until an unbound variable or a
  /// non-variable term is reached. Does not descend into arguments.
  Term resolve(const Term& t) const {
    Term cur = t;
    while (cur.is_variable()) {
      const Term* next = lookup(cur.name());
      if (!next) break;
      cur = *next;
    }
    return cur;
  }

  /// Fully instantiate `t`: every bound variable is replaced, recursively.
  Term apply(const Term& t) const {
    if (t.is_ground() || bindings_.empty()) return t;
    Term r = resolve(t);
    if (r.is_variable() || r.is_atom()) return r;
    std::vector<Term> args;
    args.reserve(r.arity());
    bool changed = false;
    for (const auto& a : r.args()) {
      args.push_back(apply(a));
      changed = changed || !args.back().same_node(a);
    }
    if (!changed) return r;
    return Term::compound(r.name(), std::move(args));
  }

  /// True if variable `var` occurs in `t` under this substitution.
  bool occurs(std::string_view var, const Term& t) const {
    if (t.is_ground()) return false;
    Term r = resolve(t);
    if (r.is_variable()) return r.name() == var;
    for (const auto& a : r.args())
      if (occurs(var, a)) return true;
    return false;
  }

  /// Bind an unbound variable. Returns false on occurs-check failure.
  bool bind(const std::string& var, const Term& value) {
    Term r = resolve(value);
    if (r.is_variable() && r.name() == var) return true;
    if (occurs(var, r)) return false;
    bindings_.insert_or_assign(var, r);
    return true;
  }

  /// Keep only bindings for `vars`, fully applied.
  Substitution restricted_to(const std::set<std::string>& vars) const {
    Substitution out;
    for (const auto& v : vars) {
      Term value = apply(Term::variable(v));
      if (!(value.is_variable() && value.name() == v)) out.bindings_.emplace(v, value);
    }
    return out;
  }

  friend bool operator==(const Substitution& a, const Substitution& b) {
    if (a.bindings_.size() != b.bindings_.size()) return false;
    auto ib = b.bindings_.begin();
    for (const auto& [k, v] : a.bindings_) {
      if (k != ib->first || !(v == ib->second)) return false;
      ++ib;
    }
    return true;
  }

  std::string str() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : bindings_) {
      if (!first) out += ", ";
      first = false;
      out += k;
      out += "->";
      v.append_to(out);
    }
    out += "}";
    return out;
  }

 private:
  Map bindings_;
};

inline Term substitute(const Term& t, const Substitution& s) { return s.apply(t); }

inline std::vector<Term> substitute(std::span<const Term> ts, const Substitution& s) {
  std::vector<Term> out;
  out.reserve(ts.size());
  for (const auto& t : ts) out.push_back(s.apply(t));
  return out;
}

namespace detail {

inline bool unify_into(const Term& a, const Term& b, Substitution& s) {
  Term x = s.resolve(a);
  Term y = s.resolve(b);
  if (x.same_node(y)) return true;
  if (x.is_variable()) return s.bind(x.name(), y);
  if (y.is_variable()) return s.bind(y.name(), x);
  if (x.kind() != y.kind() || x.arity() != y.arity() || x.name() != y.name()) return false;
  if (x.is_ground() && y.is_ground()) return x == y;
  for (std::size_t i = 0; i < x.arity(); ++i)
    if (!unify_into(x.arg(i), y.arg(i), s)) return false;
  return true;
}

}  // namespace detail

/// Most general unifier of `a` and `b` extending `s`, or nullopt.
inline std::optional<Substitution> unify(const Term& a, const Term& b, const Substitution& s = {}) {
  Substitution out = s;
  if (!detail::unify_into(a, b, out)) return std::nullopt;
  return out;
}

/// Unify two equal-length term lists pairwise.
inline std::optional<Substitution> unify_lists(std::span<const Term> a, std::span<const Term> b,
                                               const Substitution& s = {}) {
  if (a.size() != b.size()) return std::nullopt;
  Substitution out = s;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!detail::unify_into(a[i], b[i], out)) return std::nullopt;
  return out;
}

inline bool unifiable(const Term& a, const Term& b, const Substitution& s = {}) {
  Substitution tmp = s;
  return detail::unify_into(a, b, tmp);
}

// ---------------------------------------------------------------------------
// Fresh renaming

namespace detail {
inline std::atomic<std::uint64_t>& fresh_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}
}  // namespace detail

/// Renames variables consistently across several terms of one clause. Every
/// Renamer draws names from a process-wide atomic counter, so distinct
/// renamings never share a variable, even across threads.
class Renamer {
 public:
  Term operator()(const Term& t) {
    if (t.is_ground()) return t;
    if (t.is_variable()) {
      auto it = mapping_.find(t.name());
      if (it == mapping_.end()) {
        auto id = detail::fresh_counter().fetch_add(1, std::memory_order_relaxed) + 1;
        it = mapping_.emplace(t.name(), Term::variable("_G" + std::to_string(id))).first;
      }
      return it->second;
    }
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const auto& a : t.args()) args.push_back((*this)(a));
    return Term::compound(t.name(), std::move(args));
  }

  std::vector<Term> operator()(std::span<const Term> ts) {
    std::vector<Term> out;
    out.reserve(ts.size());
    for (const auto& t : ts) out.push_back((*this)(t));
    return out;
  }

  /// Original variable name -> fresh variable.
  const std::map<std::string, Term>& mapping() const { return mapping_; }

 private:
  std::map<std::string, Term> mapping_;
};

inline Term rename_fresh(const Term& t) { return Renamer{}(t); }

// ---------------------------------------------------------------------------
// Lexical conventions

inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
inline bool is_variable_name(std::string_view name) {
  return !name.empty() && ((name[0] >= 'A' && name[0] <= 'Z') || name[0] == '_');
}
inline bool is_anonymous_name(std::string_view name) { return !name.empty() && name[0] == '_'; }

}  // namespace talespin
