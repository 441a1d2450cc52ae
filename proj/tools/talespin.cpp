// talespin: command-line front end for the incident generator.
//
// Exit status: 0 on success, 1 on a runtime failure (no plan, bad step
// index, stale plan), 2 on unreadable or invalid input.

#include <cstdint>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "talespin/talespin.hpp"

using namespace talespin;

namespace {

struct Exit {
  int code;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "talespin: cannot read " << path << "\n";
    throw Exit{2};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void report(const std::vector<Diagnostic>& diags, const std::string& file) {
  for (const auto& d : diags) std::cerr << d.format(file) << "\n";
}

// Antagonist files hold only actions, so reachability warnings are noise there.
KnowledgeBase load_kb(const std::string& path, bool complete = true, bool warnings = true) {
  auto res = parse_kb(read_file(path), {complete, complete});
  report(res.diagnostics, path);
  if (!res.ok()) throw Exit{2};
  auto diags = validate_kb(res.kb);
  if (!warnings) std::erase_if(diags, [](const Diagnostic& d) { return d.severity == Severity::Warning; });
  report(diags, path);
  if (has_errors(diags)) throw Exit{2};
  return res.kb;
}

Term parse_goal(const std::string& text) {
  try {
    return parse_term(text);
  } catch (const ParseError& e) {
    std::cerr << "talespin: bad goal '" << text << "': " << e.what() << "\n";
    throw Exit{2};
  }
}

const char* kSeparator = "----------\n";

// ---------------------------------------------------------------------------
// generate / replay

struct RunResult {
  RunManifest manifest;
  std::variant<Trace, std::string> outcome;  // trace or error message
  RngState rng_after;
};

RunResult run_one(const RunManifest& m, const KnowledgeBase& kb) {
  SimConfig cfg;
  cfg.happening_prob = m.prob;
  cfg.max_happenings = m.max_happenings;
  cfg.rng = m.rng;
  cfg.injection_schedule = m.injections;
  cfg.planner.scorer = m.scorer;
  RunResult r{m, std::string(), m.rng};
  try {
    r.outcome = generate_incident(kb, cfg);
  } catch (const Error& e) {
    r.outcome = std::string(e.what());
  } catch (const std::invalid_argument& e) {
    r.outcome = std::string(e.what());
  }
  r.rng_after = cfg.rng;
  return r;
}

StoryStyle parse_style(const std::string& s) { return s == "appendix" ? StoryStyle::Appendix : StoryStyle::Plain; }

// Runs are independent when seeded (run i uses seed + i); table mode shares
// one stream, so those runs go in sequence.
std::vector<RunResult> run_all(const std::vector<RunManifest>& manifests, const KnowledgeBase& kb, bool chain_table) {
  std::vector<RunResult> out;
  if (chain_table) {
    std::optional<RngState> carry;
    for (auto m : manifests) {
      if (carry) m.rng = *carry;
      out.push_back(run_one(m, kb));
      carry = out.back().rng_after;
    }
    return out;
  }
  std::vector<std::future<RunResult>> jobs;
  for (const auto& m : manifests) jobs.push_back(std::async(std::launch::async, [&kb, m] { return run_one(m, kb); }));
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

int emit(const std::vector<RunResult>& runs, const KnowledgeBase& kb, bool json) {
  int status = 0;
  if (json) {
    nlohmann::json all = nlohmann::json::array();
    for (const auto& r : runs) {
      if (const auto* err = std::get_if<std::string>(&r.outcome)) {
        std::cerr << "talespin: " << *err << "\n";
        status = 1;
        continue;
      }
      all.push_back(trace_to_json(std::get<Trace>(r.outcome), kb, r.manifest));
    }
    std::cout << (all.size() == 1 ? all[0] : all).dump(2) << "\n";
    return status;
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i) std::cout << kSeparator;
    const auto& r = runs[i];
    if (const auto* err = std::get_if<std::string>(&r.outcome)) {
      std::cerr << "talespin: " << *err << "\n";
      status = 1;
      continue;
    }
    std::cout << render_story(std::get<Trace>(r.outcome), kb, parse_style(r.manifest.style));
  }
  return status;
}

int replay(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "talespin: " << path << ": " << e.what() << "\n";
    return 2;
  }
  if (!doc.is_array()) doc = nlohmann::json::array({doc});
  std::vector<RunManifest> manifests;
  try {
    for (const auto& d : doc) manifests.push_back(manifest_from_json(d.contains("manifest") ? d["manifest"] : d));
  } catch (const std::exception& e) {
    std::cerr << "talespin: " << path << ": bad manifest: " << e.what() << "\n";
    return 2;
  }
  if (manifests.empty()) return 0;
  int status = 0;
  std::map<std::string, KnowledgeBase> kbs;
  std::vector<RunResult> runs;
  for (const auto& m : manifests) {
    if (!kbs.count(m.kb_path)) kbs.emplace(m.kb_path, load_kb(m.kb_path));
    runs.push_back(run_one(m, kbs.at(m.kb_path)));
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i) std::cout << kSeparator;
    if (const auto* err = std::get_if<std::string>(&runs[i].outcome)) {
      std::cerr << "talespin: " << *err << "\n";
      status = 1;
      continue;
    }
    const auto& m = runs[i].manifest;
    std::cout << render_story(std::get<Trace>(runs[i].outcome), kbs.at(m.kb_path), parse_style(m.style));
  }
  return status;
}

// Flags shared by generate and explain.
struct RunFlags {
  std::string kb;
  std::optional<std::uint64_t> seed;
  bool table = false;
  double prob = 0.3;
  std::optional<std::size_t> max_happenings;
  std::vector<std::string> inject;
  std::string scorer = "appendix";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--kb", kb, "knowledge base file")->required();
    auto* s = cmd->add_option("--seed", seed, "seeded random stream (SplitMix64)");
    cmd->add_flag("--table", table, "fixed 20-value random table (default)")->excludes(s);
    cmd->add_option("--prob", prob, "chance of a happening before each step")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--max-happenings", max_happenings, "happenings allowed per incident");
    cmd->add_option("--inject", inject, "force a happening, STEP:EVENT (repeatable)");
    cmd->add_option("--scorer", scorer, "plan scorer: appendix or constant");
  }

  RunManifest manifest(const std::string& command) const {
    RunManifest m;
    m.kb_path = kb;
    m.command = command;
    m.rng = seed ? RngState::seeded(*seed) : RngState::table();
    m.prob = prob;
    for (const auto& s : inject) {
      try {
        m.injections.push_back(parse_injection(s));
      } catch (const Error& e) {
        std::cerr << "talespin: " << e.what() << "\n";
        throw Exit{2};
      }
    }
    m.max_happenings = max_happenings ? *max_happenings : std::max<std::size_t>(1, m.injections.size());
    if (!is_known_scorer(scorer)) {
      std::cerr << "talespin: unknown scorer '" << scorer << "'\n";
      throw Exit{2};
    }
    m.scorer = scorer;
    return m;
  }
};

// ---------------------------------------------------------------------------
// plan / explain / validate / grammar / forward

void print_plan(const Plan& plan) {
  if (plan.empty()) std::cout << "  (empty plan)\n";
  for (std::size_t i = 0; i < plan.size(); ++i) std::cout << "  " << i + 1 << ". " << plan.steps[i].action() << "\n";
}

int cmd_plan(const std::string& kb_path, const std::optional<std::string>& goal_text, bool all,
             const std::string& scorer, std::size_t max_length) {
  auto kb = load_kb(kb_path, false);
  if (!is_known_scorer(scorer)) {
    std::cerr << "talespin: unknown scorer '" << scorer << "'\n";
    return 2;
  }
  if (!goal_text && !kb.goal) {
    std::cerr << "talespin: " << kb_path << " declares no goal; pass --goal\n";
    return 2;
  }
  Term goal = goal_text ? parse_goal(*goal_text) : *kb.goal;
  PlannerConfig cfg{max_length, scorer};
  if (all) {
    auto scored = score_plans(enumerate_plans(goal, kb.init, kb, cfg), scorer);
    if (scored.empty()) {
      std::cerr << "talespin: no plan found for " << goal << "\n";
      return 1;
    }
    std::cout << scored.size() << " plan(s) for " << goal << "\n";
    for (const auto& sp : scored) std::cout << "quality " << sp.quality << ": " << sp.plan.as_term() << "\n";
    return 0;
  }
  try {
    auto best = make_best_plan(goal, kb.init, kb, cfg);
    std::cout << "plan for " << goal << ":\n";
    print_plan(best.plan);
    std::cout << "quality: " << best.quality << "\n";
  } catch (const NoPlanFound& e) {
    std::cerr << "talespin: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_explain(const RunFlags& flags, std::optional<std::size_t> step) {
  auto kb = load_kb(flags.kb);
  auto run = run_one(flags.manifest("explain"), kb);
  if (const auto* err = std::get_if<std::string>(&run.outcome)) {
    std::cerr << "talespin: " << *err << "\n";
    return 1;
  }
  const auto& tr = std::get<Trace>(run.outcome);
  try {
    if (step) {
      std::cout << format_explanation(explain(tr, *step));
    } else {
      for (std::size_t i = 0; i < tr.steps.size(); ++i) std::cout << format_explanation(explain(tr, i));
    }
  } catch (const IndexOutOfRange& e) {
    std::cerr << "talespin: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  auto res = parse_kb(read_file(path));
  report(res.diagnostics, path);
  if (!res.ok()) return 2;
  auto diags = validate_kb(res.kb);
  report(diags, path);
  if (has_errors(diags)) return 2;
  std::cout << path << ": " << res.kb.count(EventKind::Action) << " actions, " << res.kb.count(EventKind::Happening)
            << " happenings, " << res.kb.rules.size() << " rules, " << res.kb.revisions.size() << " revisions\n";
  return 0;
}

std::string join_words(const std::vector<std::string>& ws) {
  std::string out;
  for (const auto& w : ws) out += (out.empty() ? "" : " ") + w;
  return out;
}

int cmd_grammar(const std::string& path, const std::string& symbol, bool enumerate, bool sample,
                std::optional<std::uint64_t> seed, std::size_t max_depth) {
  auto res = parse_grammar(read_file(path));
  report(res.diagnostics, path);
  if (!res.ok()) return 2;
  Term sym = parse_goal(symbol);
  try {
    if (enumerate || !sample) {
      auto e = enumerate_expansions(res.grammar, sym, max_depth);
      for (const auto& s : e.sequences) std::cout << join_words(s) << "\n";
      for (const auto& d : e.dead_ends) std::cerr << "dead end: no production for " << d << "\n";
      if (e.truncated) std::cerr << "note: some expansions were cut at depth " << max_depth << "\n";
      return 0;
    }
    RngState rng = seed ? RngState::seeded(*seed) : RngState::table();
    auto x = expand(res.grammar, sym, rng, max_depth);
    if (x.dead_end) {
      std::cout << join_words(x.words) << (x.words.empty() ? "" : " ") << "...\n";
      std::cerr << "dead end: no production for " << *x.dead_end << "\n";
      return 0;
    }
    std::cout << join_words(x.words) << "\n";
  } catch (const Error& e) {
    std::cerr << "talespin: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_forward(const std::string& kb_path, const std::optional<std::string>& goal_text, std::size_t depth,
                const std::optional<std::string>& adversary, const std::string& evaluation) {
  auto kb = load_kb(kb_path, false);
  if (!goal_text && !kb.goal) {
    std::cerr << "talespin: " << kb_path << " declares no goal; pass --goal\n";
    return 2;
  }
  Term goal = goal_text ? parse_goal(*goal_text) : *kb.goal;
  SearchConfig cfg{depth, evaluation};
  try {
    if (!adversary) {
      auto plan = forward_search(kb.init, goal, kb, cfg);
      std::cout << "plan for " << goal << ":\n";
      print_plan(plan);
      return 0;
    }
    auto antagonist = load_kb(*adversary, false, false);
    std::vector<EventDef> moves;
    for (const auto& e : antagonist.events)
      if (e.kind == EventKind::Action) moves.push_back(e);
    auto tr = adversarial_story(kb, goal, moves, cfg);
    auto world = adversarial_world(kb, moves);
    for (const auto& st : tr.steps)
      std::cout << (st.kind() == EventKind::Action ? "hero:       " : "antagonist: ") << render_event(st.event, world)
                << "\n";
  } catch (const NoPlanFound&) {
    std::cerr << "talespin: no plan within depth " << depth << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "talespin: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aviation incident generator"};
  app.set_version_flag("--version", kToolVersion);
  std::optional<std::string> replay_path;
  app.add_option("--replay", replay_path, "rerun the incidents recorded in a JSON manifest or trace");
  app.require_subcommand(0, 1);

  // generate
  auto* gen = app.add_subcommand("generate", "simulate incidents and print them");
  RunFlags gen_flags;
  gen_flags.add_to(gen);
  std::size_t count = 1;
  std::string format = "text", style = "plain";
  gen->add_option("--count", count, "number of incidents")->check(CLI::PositiveNumber);
  gen->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
  gen->add_option("--style", style)->check(CLI::IsMember({"plain", "appendix"}));

  // plan
  auto* plan = app.add_subcommand("plan", "print the best plan (or all plans) for a goal");
  std::string plan_kb, plan_scorer = "appendix";
  std::optional<std::string> plan_goal;
  bool plan_all = false;
  std::size_t plan_max = 20;
  plan->add_option("--kb", plan_kb)->required();
  plan->add_option("--goal", plan_goal, "goal term (default: the KB's goal)");
  plan->add_flag("--all", plan_all, "list every enumerated plan with its score");
  plan->add_option("--scorer", plan_scorer);
  plan->add_option("--max-length", plan_max)->check(CLI::NonNegativeNumber);

  // explain
  auto* expl = app.add_subcommand("explain", "why each step of a generated incident happened");
  RunFlags expl_flags;
  expl_flags.add_to(expl);
  std::optional<std::size_t> expl_step;
  expl->add_option("--step", expl_step, "trace step (0-based); all steps if omitted");

  // validate
  auto* val = app.add_subcommand("validate", "parse and check a knowledge base");
  std::string val_kb;
  val->add_option("--kb", val_kb)->required();

  // grammar
  auto* gram = app.add_subcommand("grammar", "expand a story grammar");
  std::string gram_file, gram_symbol;
  bool gram_enum = false, gram_sample = false;
  std::optional<std::uint64_t> gram_seed;
  std::size_t gram_depth = 16;
  gram->add_option("--file", gram_file)->required();
  gram->add_option("--symbol", gram_symbol)->required();
  auto* e_flag = gram->add_flag("--enumerate", gram_enum, "every complete expansion");
  gram->add_flag("--sample", gram_sample, "one random expansion")->excludes(e_flag);
  gram->add_option("--seed", gram_seed);
  gram->add_option("--max-depth", gram_depth)->check(CLI::PositiveNumber);

  // forward
  auto* fwd = app.add_subcommand("forward", "forward-chaining search baseline");
  std::string fwd_kb, fwd_eval = "plan_distance";
  std::optional<std::string> fwd_goal, fwd_adv;
  std::size_t fwd_depth = 8;
  fwd->add_option("--kb", fwd_kb)->required();
  fwd->add_option("--goal", fwd_goal);
  fwd->add_option("--depth", fwd_depth)->check(CLI::PositiveNumber);
  fwd->add_option("--adversary", fwd_adv, "KB file whose actions belong to an antagonist");
  fwd->add_option("--evaluation", fwd_eval)->check(CLI::IsMember({"plan_distance", "goal_test"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (replay_path) return replay(*replay_path);
    if (gen->parsed()) {
      auto kb = load_kb(gen_flags.kb);
      auto base = gen_flags.manifest("generate");
      base.style = style;
      std::vector<RunManifest> manifests;
      for (std::size_t i = 0; i < count; ++i) {
        RunManifest m = base;
        if (gen_flags.seed) m.rng = RngState::seeded(*gen_flags.seed + i);
        manifests.push_back(m);
      }
      return emit(run_all(manifests, kb, !gen_flags.seed), kb, format == "json");
    }
    if (plan->parsed()) return cmd_plan(plan_kb, plan_goal, plan_all, plan_scorer, plan_max);
    if (expl->parsed()) return cmd_explain(expl_flags, expl_step);
    if (val->parsed()) return cmd_validate(val_kb);
    if (gram->parsed()) return cmd_grammar(gram_file, gram_symbol, gram_enum, gram_sample, gram_seed, gram_depth);
    if (fwd->parsed()) return cmd_forward(fwd_kb, fwd_goal, fwd_depth, fwd_adv, fwd_eval);
    std::cerr << app.help();
    return 2;
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "talespin: " << e.what() << "\n";
    return 1;
  }
}
