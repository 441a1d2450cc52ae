#pragma once
//
// Reader and writer for the declarative `.kb` and `.grammar` formats.
//
//   action take_off(Airplane, Airport) {
//     pre: alocation(Airplane, runway(Airport));
//     del: alocation(Airplane, runway(Airport));
//     add: alocation(Airplane, near(Airport));
//     text: "The plane took off from {Airport}.";
//   }
//   happening fire(engine) { add: on_fire(engine); text: "The engine caught fire."; }
//   rule a_on_ground(Airplane) :- alocation(Airplane, gate(_)).
//   revise plocation(Passengers, _) when on_fire(engine) => p_on_ground(Passengers).
//   init { plocation(passengers1, gate(seattle)); ... }
//   goal plocation(passengers1, gate(dallas)).
//   grammar { incident --> start_of_flight, problem(P), response(P). }
//
// Event fields appear in the order pre, del, add, text; each is optional.
// Parsing recovers at declaration boundaries, so one bad declaration does not
// hide diagnostics for the rest of the file.
//

#include <string>
#include <string_view>
#include <vector>

#include "talespin/kb.hpp"
#include "talespin/syntax.hpp"

namespace talespin {

// ---------------------------------------------------------------------------
// Templates

/// Decode a template string body (escapes still raw) into segments.
inline TextTemplate parse_template(std::string_view raw, SourceLocation where = {}) {
  TextTemplate out;
  std::string lit;
  auto flush = [&] {
    if (!lit.empty()) out.segments.emplace_back(TextTemplate::Literal{std::move(lit)});
    lit.clear();
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == '\\') {
      if (i + 1 >= raw.size()) throw ParseError(where, "dangling escape in template");
      char e = raw[++i];
      switch (e) {
        case '\\': case '"': case '{': case '}': lit += e; break;
        case 'n': lit += '\n'; break;
        default: throw ParseError(where, std::string("unknown escape '\\") + e + "' in template");
      }
      continue;
    }
    if (c == '{') {
      auto close = raw.find('}', i + 1);
      if (close == std::string_view::npos) throw ParseError(where, "unterminated slot in template");
      std::string_view name = raw.substr(i + 1, close - i - 1);
      bool valid = !name.empty() && is_variable_name(name) && !is_anonymous_name(name);
      for (char d : name) valid = valid && is_ident_char(d);
      if (!valid) throw ParseError(where, "template slot '{" + std::string(name) + "}' is not a variable name");
      flush();
      out.segments.emplace_back(TextTemplate::Slot{std::string(name)});
      i = close;
      continue;
    }
    if (c == '}') throw ParseError(where, "unmatched '}' in template");
    lit += c;
  }
  flush();
  return out;
}

inline std::string serialize_template(const TextTemplate& t) {
  std::string out = "\"";
  for (const auto& seg : t.segments) {
    if (const auto* lit = std::get_if<TextTemplate::Literal>(&seg)) {
      for (char c : lit->text) {
        switch (c) {
          case '\\': case '"': case '{': case '}': out += '\\'; out += c; break;
          case '\n': out += "\\n"; break;
          default: out += c;
        }
      }
    } else {
      out += '{' + std::get<TextTemplate::Slot>(seg).variable + '}';
    }
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::vector<Term> parse_fact_list(TokenCursor& cur) {
  std::vector<Term> out;
  if (cur.at(Tok::Semicolon)) return out;
  for (;;) {
    out.push_back(cur.parse_term());
    if (cur.at(Tok::Comma)) {
      cur.next();
      continue;
    }
    return out;
  }
}

inline Production parse_production(TokenCursor& cur) {
  Production p;
  p.head = cur.parse_term();
  if (p.head.is_variable()) throw ParseError(cur.peek().where, "production head must be a nonterminal, not a variable");
  cur.expect(Tok::Arrow, "after production head");
  for (;;) {
    if (cur.at(Tok::LBracket)) {
      cur.next();
      Production::Terminals ts;
      if (!cur.at(Tok::RBracket)) {
        for (;;) {
          const Token& w = cur.peek();
          if (w.kind != Tok::Ident || is_variable_name(w.text)) cur.fail(w, "expected a terminal word");
          ts.words.push_back(w.text);
          cur.next();
          if (cur.at(Tok::Comma)) {
            cur.next();
            continue;
          }
          break;
        }
      }
      cur.expect(Tok::RBracket, "to close terminal list");
      p.body.emplace_back(std::move(ts));
    } else {
      Term nt = cur.parse_term();
      if (nt.is_variable()) throw ParseError(cur.peek().where, "nonterminal reference cannot be a variable");
      p.body.emplace_back(std::move(nt));
    }
    if (cur.at(Tok::Comma)) {
      cur.next();
      continue;
    }
    break;
  }
  cur.expect(Tok::Dot, "to end production");
  return p;
}

inline EventDef parse_event(TokenCursor& cur, EventKind kind) {
  EventDef ev;
  ev.kind = kind;
  ev.head = cur.parse_term();
  if (ev.head.is_variable()) cur.fail(cur.peek(), "event head must be an atom or compound");
  cur.expect(Tok::LBrace, "after event head");
  static constexpr std::string_view kFields[] = {"pre", "del", "add", "text"};
  int last = -1;
  while (!cur.at(Tok::RBrace)) {
    const Token& f = cur.peek();
    int idx = -1;
    if (f.kind == Tok::Ident)
      for (int k = 0; k < 4; ++k)
        if (f.text == kFields[k]) idx = k;
    if (idx < 0) cur.fail(f, "expected one of 'pre', 'del', 'add', 'text'");
    if (idx <= last) throw ParseError(f.where, "field '" + f.text + "' is repeated or out of order (pre, del, add, text)");
    last = idx;
    cur.next();
    cur.expect(Tok::Colon, "after field name");
    if (idx == 3) {
      const Token& s = cur.peek();
      if (s.kind != Tok::String) cur.fail(s, "expected a quoted template");
      ev.text = parse_template(s.text, s.where);
      cur.next();
    } else {
      auto facts = parse_fact_list(cur);
      (idx == 0 ? ev.pcs : idx == 1 ? ev.dels : ev.adds) = std::move(facts);
    }
    cur.expect(Tok::Semicolon, "to end field");
  }
  cur.next();
  return ev;
}

}  // namespace detail

struct KbParseOptions {
  bool require_init = true;
  bool require_goal = true;
};

struct KbParseResult {
  KnowledgeBase kb;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return !has_errors(diagnostics); }
};

inline KbParseResult parse_kb(std::string_view text, KbParseOptions options = {}) {
  KbParseResult res;
  TokenCursor cur(tokenize(text));
  bool seen_init = false, seen_goal = false;
  auto error = [&](SourceLocation where, std::string msg) {
    res.diagnostics.push_back({Severity::Error, where, std::move(msg)});
  };

  while (!cur.at_end()) {
    std::size_t start = cur.position();
    const Token kw = cur.peek();
    cur.begin_clause();
    try {
      if (kw.kind != Tok::Ident) cur.fail(kw, "expected a declaration");
      if (kw.text == "action" || kw.text == "happening") {
        cur.next();
        res.kb.events.push_back(
            detail::parse_event(cur, kw.text == "action" ? EventKind::Action : EventKind::Happening));
      } else if (kw.text == "rule") {
        cur.next();
        DerivationRule r;
        r.head = cur.parse_term();
        cur.expect(Tok::Neck, "after rule head");
        r.body = detail::parse_fact_list(cur);
        if (r.body.empty()) cur.fail(cur.peek(), "expected a rule body");
        cur.expect(Tok::Dot, "to end rule");
        res.kb.rules.push_back(std::move(r));
      } else if (kw.text == "revise") {
        cur.next();
        RevisionRule r;
        r.old_goal = cur.parse_term();
        cur.expect_ident("when");
        r.trigger = cur.parse_term();
        cur.expect(Tok::FatArrow, "before the revised goal");
        r.new_goal = cur.parse_term();
        cur.expect(Tok::Dot, "to end revision rule");
        res.kb.revisions.push_back(std::move(r));
      } else if (kw.text == "init") {
        cur.next();
        cur.expect(Tok::LBrace, "after 'init'");
        Situation s;
        while (!cur.at(Tok::RBrace)) {
          s.insert(cur.parse_term());
          cur.expect(Tok::Semicolon, "after initial fact");
        }
        cur.next();
        if (seen_init)
          error(kw.where, "duplicate init declaration");
        else
          res.kb.init = std::move(s);
        seen_init = true;
      } else if (kw.text == "goal") {
        cur.next();
        Term g = cur.parse_term();
        cur.expect(Tok::Dot, "to end goal");
        if (seen_goal)
          error(kw.where, "duplicate goal declaration");
        else
          res.kb.goal = std::move(g);
        seen_goal = true;
      } else if (kw.text == "grammar") {
        cur.next();
        cur.expect(Tok::LBrace, "after 'grammar'");
        Grammar g;
        while (!cur.at(Tok::RBrace)) {
          if (cur.at_end()) cur.fail(cur.peek(), "expected '}' to close grammar block");
          cur.begin_clause();
          g.productions.push_back(detail::parse_production(cur));
        }
        cur.next();
        res.kb.grammars.push_back(std::move(g));
      } else {
        cur.fail(kw, "expected a declaration (action, happening, rule, revise, init, goal, grammar)");
      }
    } catch (const ParseError& e) {
      error(e.where(), e.bare_message());
      cur.recover(start);
    }
  }

  bool missing_init = options.require_init && !seen_init;
  bool missing_goal = options.require_goal && !seen_goal;
  SourceLocation eof = cur.peek().where;
  if (missing_init && missing_goal)
    error(eof, "missing init/goal declarations");
  else if (missing_init)
    error(eof, "missing init declaration");
  else if (missing_goal)
    error(eof, "missing goal declaration");
  return res;
}

struct GrammarParseResult {
  Grammar grammar;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return !has_errors(diagnostics); }
};

/// Parse a `.grammar` file: a sequence of `head --> body.` productions.
inline GrammarParseResult parse_grammar(std::string_view text) {
  GrammarParseResult res;
  TokenCursor cur(tokenize(text));
  while (!cur.at_end()) {
    std::size_t start = cur.position();
    cur.begin_clause();
    try {
      res.grammar.productions.push_back(detail::parse_production(cur));
    } catch (const ParseError& e) {
      res.diagnostics.push_back({Severity::Error, e.where(), e.bare_message()});
      cur.recover(start);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline std::string join_terms(std::span<const Term> ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ", ";
    ts[i].append_to(out);
  }
  return out;
}

inline std::string serialize_production(const Production& p) {
  std::string out = p.head.str() + " --> ";
  for (std::size_t i = 0; i < p.body.size(); ++i) {
    if (i) out += ", ";
    if (const auto* nt = std::get_if<Term>(&p.body[i])) {
      out += nt->str();
    } else {
      const auto& ws = std::get<Production::Terminals>(p.body[i]).words;
      out += '[';
      for (std::size_t k = 0; k < ws.size(); ++k) out += (k ? ", " : "") + ws[k];
      out += ']';
    }
  }
  return out + ".";
}

}  // namespace detail

inline std::string serialize_grammar(const Grammar& g) {
  std::string out;
  for (const auto& p : g.productions) out += detail::serialize_production(p) + "\n";
  return out;
}

/// Canonical text for `kb`. parse_kb(serialize_kb(kb)) reproduces `kb`.
inline std::string serialize_kb(const KnowledgeBase& kb) {
  std::string out;
  for (const auto& e : kb.events) {
    out += std::string(to_string(e.kind)) + " " + e.head.str() + " {\n";
    if (!e.pcs.empty()) out += "  pre: " + detail::join_terms(e.pcs) + ";\n";
    if (!e.dels.empty()) out += "  del: " + detail::join_terms(e.dels) + ";\n";
    if (!e.adds.empty()) out += "  add: " + detail::join_terms(e.adds) + ";\n";
    out += "  text: " + serialize_template(e.text) + ";\n}\n\n";
  }
  for (const auto& r : kb.rules) out += "rule " + r.head.str() + " :- " + detail::join_terms(r.body) + ".\n";
  if (!kb.rules.empty()) out += "\n";
  for (const auto& r : kb.revisions)
    out += "revise " + r.old_goal.str() + " when " + r.trigger.str() + " => " + r.new_goal.str() + ".\n";
  if (!kb.revisions.empty()) out += "\n";
  out += "init {\n";
  for (const auto& f : kb.init) out += "  " + f.str() + ";\n";
  out += "}\n";
  if (kb.goal) out += "goal " + kb.goal->str() + ".\n";
  for (const auto& g : kb.grammars) {
    out += "\ngrammar {\n";
    for (const auto& p : g.productions) out += "  " + detail::serialize_production(p) + "\n";
    out += "}\n";
  }
  return out;
}

}  // namespace talespin
