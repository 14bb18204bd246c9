#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "datr/core.hpp"

namespace datr {

struct Query {
  std::string node;
  AttrPath path;

  bool operator<(const Query& o) const {
    if (node != o.node) return node < o.node;
    return path < o.path;
  }
  bool operator==(const Query& o) const {
    return node == o.node && path == o.path;
  }
};

inline std::string query_to_string(const Query& q) {
  return q.node + ":" + path_to_string(q.path);
}

struct EvalLimits {
  int max_path_len = 10;  // atoms per query path
  int max_depth = 50;     // descriptor-expansion recursion depth
};

enum class EvalStatus { Value, Undefined, LimitExceeded };

struct EvalResult {
  EvalStatus status = EvalStatus::Undefined;
  std::vector<Atom> value;

  bool defined() const { return status == EvalStatus::Value; }
  std::string value_text() const {
    std::string out;
    for (size_t i = 0; i < value.size(); ++i) {
      if (i) out += ' ';
      out += value[i];
    }
    return out;
  }
};

struct SentenceMatch {
  const Sentence* sentence;
  AttrPath extension;  // query path = sentence lhs path ^ extension
};

// The sentence at `node` whose LHS path is the longest prefix of `path`.
// There is at most one: distinct defined paths cannot both be longest
// prefixes of the same query path.
inline std::optional<SentenceMatch> lookup_sentence(const Theory& theory,
                                                    const std::string& node,
                                                    const AttrPath& path) {
  const std::set<AttrPath>& defined = theory.paths_at(node);
  const AttrPath* best = nullptr;
  for (const auto& p : defined) {
    if (!is_prefix(p, path)) continue;
    if (!best || p.size() > best->size()) best = &p;
  }
  if (!best) return std::nullopt;
  return SentenceMatch{theory.sentence_at(node, *best), strip_prefix(*best, path)};
}

namespace detail {

struct EvalContext {
  const Theory& theory;
  EvalLimits limits;
  std::vector<std::string>* trace = nullptr;
};

struct GlobalEnv {
  std::string node;
  AttrPath path;
};

inline EvalResult eval_at(EvalContext& ctx, const std::string& node,
                          const AttrPath& path, const GlobalEnv& global,
                          int depth) {
  if (depth > ctx.limits.max_depth ||
      static_cast<int>(path.size()) > ctx.limits.max_path_len)
    return {EvalStatus::LimitExceeded, {}};
  if (ctx.trace)
    ctx.trace->push_back(std::string(static_cast<size_t>(depth), ' ') + node +
                         ":" + path_to_string(path) + " @ " + global.node +
                         ":" + path_to_string(global.path));
  auto match = lookup_sentence(ctx.theory, node, path);
  if (!match) return {EvalStatus::Undefined, {}};
  const AttrPath& ext = match->extension;

  EvalResult out{EvalStatus::Value, {}};
  for (const Descriptor& d : match->sentence->rhs) {
    EvalResult sub{EvalStatus::Value, {}};
    switch (d.kind) {
      case DescriptorKind::AtomValue:
        sub.value.push_back(d.atom);
        break;
      case DescriptorKind::EmptyValue:
        break;
      case DescriptorKind::LocalPath:
        sub = eval_at(ctx, node, concat(d.path, ext), global, depth + 1);
        break;
      case DescriptorKind::LocalNode:
        sub = eval_at(ctx, d.node, concat(match->sentence->lhs_path, ext),
                      global, depth + 1);
        break;
      case DescriptorKind::LocalNodePath:
        sub = eval_at(ctx, d.node, concat(d.path, ext), global, depth + 1);
        break;
      case DescriptorKind::GlobalNodePath: {
        GlobalEnv g{d.node, concat(d.path, ext)};
        sub = eval_at(ctx, g.node, g.path, g, depth + 1);
        break;
      }
      case DescriptorKind::GlobalNode: {
        GlobalEnv g{d.node, concat(global.path, ext)};
        sub = eval_at(ctx, g.node, g.path, g, depth + 1);
        break;
      }
      case DescriptorKind::GlobalPath: {
        GlobalEnv g{global.node, concat(d.path, ext)};
        sub = eval_at(ctx, g.node, g.path, g, depth + 1);
        break;
      }
    }
    if (sub.status != EvalStatus::Value) return sub;
    out.value.insert(out.value.end(), sub.value.begin(), sub.value.end());
  }
  return out;
}

}  // namespace detail

// Standard DATR inference with the global environment initialized to the
// query itself.
inline EvalResult eval_query(const Theory& theory, const Query& q,
                             const EvalLimits& limits = {},
                             std::vector<std::string>* trace = nullptr) {
  detail::EvalContext ctx{theory, limits, trace};
  return detail::eval_at(ctx, q.node, q.path, {q.node, q.path}, 0);
}

// All paths over `alphabet` up to the given length, shortest first,
// lexicographic within a length.
inline std::vector<AttrPath> enumerate_paths(const std::vector<Atom>& alphabet,
                                             int max_len) {
  std::vector<AttrPath> all{{}};
  std::vector<AttrPath> level{{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<AttrPath> next;
    for (const auto& p : level)
      for (const auto& a : alphabet) {
        AttrPath q = p;
        q.push_back(a);
        next.push_back(std::move(q));
      }
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return all;
}

// Every (node, path) with the node defined in the theory and the path
// drawn from the theory's attribute alphabet, up to the given length, in
// a deterministic order.
inline std::vector<Query> enumerate_queries(const Theory& theory,
                                            int max_path_len) {
  std::vector<Query> out;
  const std::set<Atom> atoms = theory.attribute_atoms();
  const std::vector<Atom> alphabet(atoms.begin(), atoms.end());
  const std::vector<AttrPath> paths = enumerate_paths(alphabet, max_path_len);
  for (const auto& node : theory.node_names())
    for (const auto& p : paths) out.push_back({node, p});
  return out;
}

}  // namespace datr
