#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "datr/datr.hpp"

namespace support {

inline datr::AttrPath p(std::initializer_list<std::string> atoms) {
  return datr::AttrPath(atoms);
}

inline datr::ConstraintSet cs(std::initializer_list<datr::AttrPath> paths) {
  return datr::ConstraintSet(paths);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string data_file(const std::string& name) {
  return std::string(DATR_DATA_DIR) + "/" + name;
}

inline datr::Theory noun_theory() {
  return datr::parse_theory_text(read_file(data_file("nouns.dtr")));
}

inline datr::RuleSet noun_rules() { return datr::compile(noun_theory()); }

// The three-equation theory used for constraint examples.
inline datr::Theory abc_theory() {
  return datr::parse_theory_text(read_file(data_file("constraints.dtr")));
}

inline bool has_answer(const std::vector<datr::ReverseAnswer>& answers,
                       const std::string& node, const datr::AttrPath& path) {
  for (const auto& a : answers)
    if (a.node == node && a.path == path) return true;
  return false;
}

inline const datr::ReverseAnswer* find_answer(
    const std::vector<datr::ReverseAnswer>& answers, const std::string& node,
    const datr::AttrPath& path) {
  for (const auto& a : answers)
    if (a.node == node && a.path == path) return &a;
  return nullptr;
}

}  // namespace support
