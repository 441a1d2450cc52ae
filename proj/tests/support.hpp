#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "talespin/talespin.hpp"

namespace testing_support {

inline std::string data_path(const std::string& name) { return std::string(TALESPIN_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline talespin::KnowledgeBase load_kb(const std::string& name, bool complete = true) {
  auto res = talespin::parse_kb(slurp(data_path(name)), {complete, complete});
  if (!res.ok()) throw std::runtime_error(name + " does not parse");
  return res.kb;
}

inline const talespin::KnowledgeBase& aviation() {
  static const talespin::KnowledgeBase kb = load_kb("aviation.kb");
  return kb;
}

inline talespin::Term T(const std::string& text) { return talespin::parse_term(text); }

inline talespin::Situation S(std::initializer_list<const char*> facts) {
  talespin::Situation s;
  for (const auto* f : facts) s.insert(talespin::parse_term(f));
  return s;
}

}  // namespace testing_support
