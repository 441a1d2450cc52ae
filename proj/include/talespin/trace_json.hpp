#pragma once
//
// JSON form of traces and the run manifest that reproduces them.
//

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "talespin/narrate.hpp"
#include "talespin/simulator.hpp"
#include "talespin/syntax.hpp"

namespace talespin {

inline constexpr const char* kToolVersion = "talespin 1.0.0";

/// Everything `generate` needs to rerun one incident.
struct RunManifest {
  std::string kb_path;
  std::string command = "generate";
  RngState rng;
  double prob = 0.3;
  std::size_t max_happenings = 1;
  std::vector<Injection> injections;
  std::string scorer = "appendix";
  std::string style = "plain";
  std::string version = kToolVersion;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

inline std::string format_injection(const Injection& inj) { return std::to_string(inj.step) + ":" + inj.happening.str(); }

/// "STEP:EVENT", e.g. "3:ill_passenger".
inline Injection parse_injection(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0) throw Error("injection '" + text + "' is not of the form STEP:EVENT");
  std::size_t step = 0;
  for (std::size_t i = 0; i < colon; ++i) {
    if (text[i] < '0' || text[i] > '9') throw Error("injection step in '" + text + "' is not a number");
    step = step * 10 + static_cast<std::size_t>(text[i] - '0');
  }
  Term ev = parse_term(text.substr(colon + 1));
  return {step, ev};
}

inline nlohmann::json manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["kb"] = m.kb_path;
  j["command"] = m.command;
  if (m.rng.mode == RngState::Mode::Table)
    j["rng"] = {{"mode", "table"}, {"index", m.rng.table_index}};
  else
    j["rng"] = {{"mode", "seed"}, {"seed", m.rng.state}};
  j["prob"] = m.prob;
  j["max_happenings"] = m.max_happenings;
  j["inject"] = nlohmann::json::array();
  for (const auto& inj : m.injections) j["inject"].push_back(format_injection(inj));
  j["scorer"] = m.scorer;
  j["style"] = m.style;
  j["version"] = m.version;
  return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.kb_path = j.at("kb").get<std::string>();
  m.command = j.value("command", "generate");
  const auto& rng = j.at("rng");
  if (rng.at("mode") == "table")
    m.rng = RngState::table(rng.at("index").get<std::size_t>());
  else
    m.rng = RngState::seeded(rng.at("seed").get<std::uint64_t>());
  m.prob = j.at("prob").get<double>();
  m.max_happenings = j.at("max_happenings").get<std::size_t>();
  for (const auto& s : j.value("inject", nlohmann::json::array())) m.injections.push_back(parse_injection(s));
  m.scorer = j.value("scorer", "appendix");
  m.style = j.value("style", "plain");
  m.version = j.value("version", kToolVersion);
  return m;
}

inline nlohmann::json situation_to_json(const Situation& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : s.facts()) out.push_back(f.str());
  return out;
}

inline nlohmann::json trace_to_json(const Trace& tr, const KnowledgeBase& kb, const RunManifest& m) {
  nlohmann::json j;
  j["manifest"] = manifest_to_json(m);
  j["initial"] = situation_to_json(tr.initial);

  auto& goals = j["goal_history"] = nlohmann::json::array();
  for (const auto& g : tr.goal_history)
    goals.push_back({{"step", g.step},
                     {"goal", g.goal.str()},
                     {"trigger", g.trigger ? nlohmann::json(g.trigger->str()) : nlohmann::json(nullptr)}});

  auto& steps = j["steps"] = nlohmann::json::array();
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    const auto& st = tr.steps[i];
    nlohmann::json js;
    js["index"] = i;
    js["kind"] = to_string(st.kind());
    js["event"] = st.term().str();
    js["text"] = render_event(st.event, kb);
    js["pre"] = situation_to_json(st.pre);
    js["post"] = situation_to_json(st.post);
    if (st.justification)
      js["justification"] = {{"plan", st.justification->plan}, {"step", st.justification->step}};
    else
      js["justification"] = nullptr;
    steps.push_back(std::move(js));
  }

  auto& plans = j["plans"] = nlohmann::json::array();
  for (const auto& p : tr.plans) {
    nlohmann::json acts = nlohmann::json::array();
    for (const auto& a : p.plan.plan.actions()) acts.push_back(a.str());
    plans.push_back({{"step", p.step}, {"goal", p.goal}, {"quality", p.plan.quality}, {"actions", acts}});
  }
  return j;
}

}  // namespace talespin
