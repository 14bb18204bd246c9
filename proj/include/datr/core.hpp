#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace datr {

// An atom is an indivisible token. Inside a path it acts as an attribute,
// outside a path it acts as a terminal; the distinction is positional.
using Atom = std::string;

// An attribute path <a1 a2 ...>; the empty vector is the empty path <>.
using AttrPath = std::vector<Atom>;

// A finite set of non-empty path suffixes. Used both for path extension
// constraints and for residual obligations on open suffix tails.
using ConstraintSet = std::set<AttrPath>;

inline bool is_prefix(const AttrPath& prefix, const AttrPath& path) {
  if (prefix.size() > path.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), path.begin());
}

inline AttrPath concat(const AttrPath& a, const AttrPath& b) {
  AttrPath out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// The part of `path` after `prefix`; requires is_prefix(prefix, path).
inline AttrPath strip_prefix(const AttrPath& prefix, const AttrPath& path) {
  return AttrPath(path.begin() + static_cast<long>(prefix.size()), path.end());
}

inline std::string path_to_string(const AttrPath& p) {
  std::string out = "<";
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) out += ' ';
    out += p[i];
  }
  out += '>';
  return out;
}

inline std::string constraint_to_string(const ConstraintSet& c) {
  std::string out = "{";
  bool first = true;
  for (const auto& p : c) {
    if (!first) out += ", ";
    first = false;
    out += path_to_string(p);
  }
  out += '}';
  return out;
}

// The eight right-hand-side descriptor forms. Quoted forms consult and
// rebind the global environment; unquoted forms leave it untouched.
enum class DescriptorKind {
  EmptyValue,      // ()
  AtomValue,       // atom
  LocalNodePath,   // Node:<path>
  LocalNode,       // Node
  LocalPath,       // <path>
  GlobalNodePath,  // "Node:<path>"
  GlobalNode,      // "Node"
  GlobalPath,      // "<path>"
};

struct Descriptor {
  DescriptorKind kind = DescriptorKind::EmptyValue;
  std::string node;  // for *Node* kinds
  AttrPath path;     // for *Path* kinds
  Atom atom;         // for AtomValue

  static Descriptor empty_value() { return {}; }
  static Descriptor atom_value(Atom a) {
    Descriptor d;
    d.kind = DescriptorKind::AtomValue;
    d.atom = std::move(a);
    return d;
  }
  static Descriptor local_node_path(std::string n, AttrPath p) {
    Descriptor d;
    d.kind = DescriptorKind::LocalNodePath;
    d.node = std::move(n);
    d.path = std::move(p);
    return d;
  }
  static Descriptor local_node(std::string n) {
    Descriptor d;
    d.kind = DescriptorKind::LocalNode;
    d.node = std::move(n);
    return d;
  }
  static Descriptor local_path(AttrPath p) {
    Descriptor d;
    d.kind = DescriptorKind::LocalPath;
    d.path = std::move(p);
    return d;
  }
  static Descriptor global_node_path(std::string n, AttrPath p) {
    Descriptor d;
    d.kind = DescriptorKind::GlobalNodePath;
    d.node = std::move(n);
    d.path = std::move(p);
    return d;
  }
  static Descriptor global_node(std::string n) {
    Descriptor d;
    d.kind = DescriptorKind::GlobalNode;
    d.node = std::move(n);
    return d;
  }
  static Descriptor global_path(AttrPath p) {
    Descriptor d;
    d.kind = DescriptorKind::GlobalPath;
    d.path = std::move(p);
    return d;
  }

  bool has_node() const {
    return kind == DescriptorKind::LocalNodePath ||
           kind == DescriptorKind::LocalNode ||
           kind == DescriptorKind::GlobalNodePath ||
           kind == DescriptorKind::GlobalNode;
  }
  bool has_path() const {
    return kind == DescriptorKind::LocalNodePath ||
           kind == DescriptorKind::LocalPath ||
           kind == DescriptorKind::GlobalNodePath ||
           kind == DescriptorKind::GlobalPath;
  }
  bool quoted() const {
    return kind == DescriptorKind::GlobalNodePath ||
           kind == DescriptorKind::GlobalNode ||
           kind == DescriptorKind::GlobalPath;
  }

  bool operator==(const Descriptor& o) const {
    return kind == o.kind && node == o.node && path == o.path && atom == o.atom;
  }
};

// One DATR sentence: Node:<lhs path> == d1 d2 ... dn .
// An empty rhs denotes the empty value.
struct Sentence {
  std::string node;
  AttrPath lhs_path;
  std::vector<Descriptor> rhs;
  int line = 0;
  int column = 0;

  bool operator==(const Sentence& o) const {
    return node == o.node && lhs_path == o.lhs_path && rhs == o.rhs;
  }
};

// A parsed theory plus the per-node index of defined LHS paths (the set
// of paths occurring under each node).
class Theory {
 public:
  Theory() = default;
  explicit Theory(std::vector<Sentence> sentences)
      : sentences_(std::move(sentences)) {
    for (size_t i = 0; i < sentences_.size(); ++i) {
      const Sentence& s = sentences_[i];
      node_index_[s.node].insert(s.lhs_path);
      sentence_index_[s.node][s.lhs_path] = i;
    }
  }

  const std::vector<Sentence>& sentences() const { return sentences_; }

  bool defines_node(const std::string& node) const {
    return node_index_.count(node) != 0;
  }

  // The set of LHS paths defined at `node`; empty set for unknown nodes.
  const std::set<AttrPath>& paths_at(const std::string& node) const {
    static const std::set<AttrPath> kEmpty;
    auto it = node_index_.find(node);
    return it == node_index_.end() ? kEmpty : it->second;
  }

  const std::map<std::string, std::set<AttrPath>>& node_index() const {
    return node_index_;
  }

  const Sentence* sentence_at(const std::string& node,
                              const AttrPath& lhs_path) const {
    auto nit = sentence_index_.find(node);
    if (nit == sentence_index_.end()) return nullptr;
    auto pit = nit->second.find(lhs_path);
    if (pit == nit->second.end()) return nullptr;
    return &sentences_[pit->second];
  }

  std::vector<std::string> node_names() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& s : sentences_)
      if (seen.insert(s.node).second) out.push_back(s.node);
    return out;
  }

  // Atoms with at least one occurrence outside a path (terminal symbols).
  std::set<Atom> terminal_atoms() const {
    std::set<Atom> out;
    for (const auto& s : sentences_)
      for (const auto& d : s.rhs)
        if (d.kind == DescriptorKind::AtomValue) out.insert(d.atom);
    return out;
  }

  // Atoms occurring inside any LHS or descriptor path (the attribute
  // alphabet used for query enumeration).
  std::set<Atom> attribute_atoms() const {
    std::set<Atom> out;
    for (const auto& s : sentences_) {
      out.insert(s.lhs_path.begin(), s.lhs_path.end());
      for (const auto& d : s.rhs)
        if (d.has_path()) out.insert(d.path.begin(), d.path.end());
    }
    return out;
  }

  bool operator==(const Theory& o) const { return sentences_ == o.sentences_; }

 private:
  std::vector<Sentence> sentences_;
  std::map<std::string, std::set<AttrPath>> node_index_;
  std::map<std::string, std::map<AttrPath, size_t>> sentence_index_;
};

// Position-tagged theory error (tokenizer, parser, duplicate LHS, ...).
class TheoryError : public std::runtime_error {
 public:
  TheoryError(std::string kind, const std::string& message, int line, int column)
      : std::runtime_error(message + " (line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ")"),
        kind_(std::move(kind)),
        line_(line),
        column_(column) {}

  const std::string& kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string kind_;
  int line_;
  int column_;
};

}  // namespace datr
