#pragma once

#include <variant>
#include <vector>

#include "islp/grammar.hpp"

namespace islp {

/// Grammar whose non-iteration rules are sequences of any length >= 1.
using FlatRule = std::variant<Terminal, std::vector<VariableId>, Iter>;

struct FlatGrammar {
  std::vector<FlatRule> rules;
  std::vector<std::string> names;  // may be shorter than rules; "" = unnamed
  VariableId start = 0;
};

FlatGrammar to_flat(const Grammar& g);

/// Splits sequences longer than two into binary rules and removes chain rules
/// A -> B by substitution. Iteration rules are kept.
Grammar binarize(const FlatGrammar& g);
Grammar binarize(const Grammar& g);

/// Rewrites iteration rules over a single block (k1 = k2) into plain
/// sequences, so that every factor of a remaining iteration rule occurs at
/// least twice in its output. A factor B^{k^c} with k^c > 1 becomes c nested
/// runs B^k.
Grammar normalize(const Grammar& g);

struct DagEdge {
  VariableId target;
  std::size_t ordinal;  // position in the right-hand side
  BigInt multiplicity;  // occurrences contributed by this position
};

/// Derivation DAG with iteration rules replaced by their output, stored with
/// multiplicities computed symbolically.
struct Dag {
  VariableId root = 0;
  std::vector<std::vector<DagEdge>> edges;  // by source; empty for terminals
  std::vector<VariableId> topo;             // children before parents

  /// Occurrences of `child` in the right-hand side of `node`.
  BigInt multiplicity(VariableId node, VariableId child) const;
  std::size_t num_nodes() const { return edges.size(); }
};

Dag to_dag(const Grammar& g);

struct PathCounts {
  std::vector<BigInt> from_root;  // pi(root, v)
  std::vector<BigInt> to_sinks;   // pi(v, W) = |exp(v)|
};

PathCounts path_counts(const Dag& d);

struct LambdaLabel {
  std::size_t in_log = 0;   // floor(log2 pi(root, v))
  std::size_t out_log = 0;  // floor(log2 pi(v, W))
  bool operator==(const LambdaLabel&) const = default;
};

std::vector<LambdaLabel> lambda_labels(const PathCounts& pc);

/// Whether edge (u, v) with this multiplicity belongs to E_scd.
bool is_scd_edge(const std::vector<LambdaLabel>& lambda, VariableId u, const DagEdge& e);

struct ScPath {
  std::vector<VariableId> nodes;  // A_0 .. A_p
  std::vector<VariableId> off;    // off[i]: child of nodes[i] not on the path
  std::vector<bool> off_left;     // off[i] is the left child
};

/// Maximal paths of E_scd. Every reachable node lies on exactly one path.
std::vector<ScPath> sc_decomposition(const Dag& d, const std::vector<LambdaLabel>& lambda);

/// SLP fragment over leaf symbols 0..n-1. Internal variable j has id n + j
/// and right-hand side rules[j]. handles[i] derives the suffix starting at i
/// (kSuffix) or the prefix ending at i (kPrefix).
struct WeightedSlp {
  enum class Side { kSuffix, kPrefix };
  std::size_t leaves = 0;
  std::vector<std::vector<std::size_t>> rules;
  std::vector<std::size_t> handles;

  bool is_leaf(std::size_t id) const { return id < leaves; }
  const std::vector<std::size_t>& rhs(std::size_t id) const { return rules.at(id - leaves); }
};

/// Weight-balanced tree over the sequence (each split minimises the heavier
/// side, ties to the left), plus one variable per suffix (prefix) built from
/// its decomposition into maximal subtrees.
WeightedSlp weighted_slp(const std::vector<BigInt>& weights, WeightedSlp::Side side);

struct BalanceStats {
  std::size_t old_size = 0, new_size = 0;
  std::size_t old_height = 0, new_height = 0;
  std::size_t sc_paths = 0;      // paths with at least one edge
  std::size_t max_in_log = 0, max_out_log = 0;
};

/// Equivalent grammar of height O(log n) and size O(|g|). Iteration rules
/// survive unchanged apart from the single-block normalisation.
Grammar balance(const Grammar& g, BalanceStats* stats = nullptr);

}  // namespace islp
