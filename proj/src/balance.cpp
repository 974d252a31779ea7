#include "islp/balance.hpp"

#include <algorithm>
#include <stdexcept>

#include "islp/poly.hpp"

namespace islp {

FlatGrammar to_flat(const Grammar& g) {
  FlatGrammar f;
  f.start = g.start();
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    const Rule& r = g.rule(v);
    if (const auto* b = std::get_if<Binary>(&r))
      f.rules.emplace_back(std::vector<VariableId>{b->left, b->right});
    else if (const auto* t = std::get_if<Terminal>(&r))
      f.rules.emplace_back(*t);
    else
      f.rules.emplace_back(std::get<Iter>(r));
    f.names.push_back(g.name(v));
  }
  return f;
}

Grammar binarize(const FlatGrammar& g) {
  const std::size_t n = g.rules.size();
  auto chain_target = [&](VariableId v) -> const VariableId* {
    const auto* seq = std::get_if<std::vector<VariableId>>(&g.rules.at(v));
    if (seq && seq->empty()) throw GrammarError("empty right-hand side");
    return seq && seq->size() == 1 ? &seq->front() : nullptr;
  };
  // resolved[v]: first variable along v -> v' -> ... that is not a chain rule.
  std::vector<VariableId> resolved(n, n);
  for (VariableId v = 0; v < n; ++v) {
    if (resolved[v] != n) continue;
    std::vector<VariableId> trail;
    VariableId u = v;
    while (resolved[u] == n) {
      const VariableId* next = chain_target(u);
      if (!next) {
        resolved[u] = u;
        break;
      }
      trail.push_back(u);
      if (trail.size() > n) throw GrammarError("cycle of chain rules");
      u = *next;
    }
    for (VariableId w : trail) resolved[w] = resolved[u];
  }

  GrammarBuilder b;
  for (VariableId v = 0; v < n; ++v) {
    const bool keep = resolved[v] == v && v < g.names.size() && !g.names[v].empty();
    b.add(keep ? g.names[v] : std::string(), Terminal{0});
  }
  auto tree = [&](auto&& self, const std::vector<VariableId>& seq, std::size_t lo,
                  std::size_t hi) -> VariableId {
    if (hi - lo == 1) return resolved[seq[lo]];
    const std::size_t mid = lo + (hi - lo) / 2;
    return b.add_binary(self(self, seq, lo, mid), self(self, seq, mid, hi));
  };
  for (VariableId v = 0; v < n; ++v) {
    if (resolved[v] != v) continue;
    const FlatRule& r = g.rules[v];
    if (const auto* t = std::get_if<Terminal>(&r)) {
      b.rule(v) = *t;
    } else if (const auto* it = std::get_if<Iter>(&r)) {
      Iter copy = *it;
      for (auto& f : copy.factors) f.var = resolved.at(f.var);
      b.rule(v) = std::move(copy);
    } else {
      const auto& seq = std::get<std::vector<VariableId>>(r);
      const std::size_t mid = seq.size() / 2;
      const VariableId l = tree(tree, seq, 0, mid);
      const VariableId rr = tree(tree, seq, mid, seq.size());
      b.rule(v) = Binary{l, rr};
    }
  }
  b.set_start(resolved.at(g.start));
  return std::move(b).build();
}

Grammar binarize(const Grammar& g) { return binarize(to_flat(g)); }

Grammar normalize(const Grammar& g) {
  FlatGrammar f = to_flat(g);
  bool changed = false;
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    const auto* it = std::get_if<Iter>(&g.rule(v));
    if (!it || it->k1 != it->k2) continue;
    changed = true;
    const BlockIndex k = it->k1;
    std::vector<VariableId> parts;
    for (const auto& fac : it->factors) {
      VariableId x = fac.var;
      if (k > 1)
        for (Exponent c = 0; c < fac.exp; ++c) {
          f.rules.emplace_back(Iter{1, k, {Factor{x, 0}}});
          x = static_cast<VariableId>(f.rules.size() - 1);
        }
      parts.push_back(x);
    }
    f.rules[v] = std::move(parts);
  }
  return changed ? binarize(f) : g;
}

BigInt Dag::multiplicity(VariableId node, VariableId child) const {
  BigInt m = 0;
  for (const auto& e : edges.at(node))
    if (e.target == child) m += e.multiplicity;
  return m;
}

Dag to_dag(const Grammar& g) {
  auto table = faulhaber_table(g.max_degree());
  Dag d;
  d.root = g.start();
  d.topo = g.topological_order();
  d.edges.resize(g.num_vars());
  for (VariableId v : d.topo) {
    const Rule& r = g.rule(v);
    if (const auto* b = std::get_if<Binary>(&r)) {
      d.edges[v].push_back({b->left, 0, 1});
      d.edges[v].push_back({b->right, 1, 1});
    } else if (const auto* it = std::get_if<Iter>(&r)) {
      for (std::size_t j = 0; j < it->factors.size(); ++j) {
        const Factor& f = it->factors[j];
        d.edges[v].push_back(
            {f.var, j, table->power_sum(f.exp, BigInt(it->lo()), BigInt(it->hi()))});
      }
    }
  }
  return d;
}

PathCounts path_counts(const Dag& d) {
  const std::size_t n = d.num_nodes();
  PathCounts pc{std::vector<BigInt>(n, 0), std::vector<BigInt>(n, 0)};
  for (VariableId v : d.topo) {
    if (d.edges[v].empty()) {
      pc.to_sinks[v] = 1;
      continue;
    }
    for (const auto& e : d.edges[v]) pc.to_sinks[v] += e.multiplicity * pc.to_sinks[e.target];
  }
  pc.from_root[d.root] = 1;
  for (auto it = d.topo.rbegin(); it != d.topo.rend(); ++it)
    for (const auto& e : d.edges[*it]) pc.from_root[e.target] += pc.from_root[*it] * e.multiplicity;
  return pc;
}

std::vector<LambdaLabel> lambda_labels(const PathCounts& pc) {
  auto log2 = [](const BigInt& x) -> std::size_t {
    return x > 0 ? boost::multiprecision::msb(x) : 0;
  };
  std::vector<LambdaLabel> out(pc.from_root.size());
  for (std::size_t v = 0; v < out.size(); ++v)
    out[v] = {log2(pc.from_root[v]), log2(pc.to_sinks[v])};
  return out;
}

bool is_scd_edge(const std::vector<LambdaLabel>& lambda, VariableId u, const DagEdge& e) {
  return lambda.at(u) == lambda.at(e.target);
}

std::vector<ScPath> sc_decomposition(const Dag& d, const std::vector<LambdaLabel>& lambda) {
  const std::size_t n = d.num_nodes();
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> down(n, kNone);  // index of the E_scd edge leaving v
  std::vector<bool> has_up(n, false);
  for (VariableId v : d.topo) {
    // Only binary nodes continue a path; an iteration node is always an
    // endpoint since each of its children occurs at least twice.
    const auto& es = d.edges[v];
    if (es.size() != 2 || es[0].multiplicity != 1 || es[1].multiplicity != 1) continue;
    for (std::size_t j = 0; j < 2; ++j) {
      if (!is_scd_edge(lambda, v, es[j])) continue;
      if (down[v] != kNone) throw std::logic_error("node with two outgoing E_scd edges");
      const VariableId t = es[j].target;
      if (has_up[t]) throw std::logic_error("node with two incoming E_scd edges");
      down[v] = j;
      has_up[t] = true;
    }
  }
  std::vector<ScPath> paths;
  for (auto it = d.topo.rbegin(); it != d.topo.rend(); ++it) {
    if (has_up[*it]) continue;
    ScPath p;
    VariableId v = *it;
    p.nodes.push_back(v);
    while (down[v] != kNone) {
      const std::size_t j = down[v];
      p.off.push_back(d.edges[v][1 - j].target);
      p.off_left.push_back(j == 1);
      v = d.edges[v][j].target;
      p.nodes.push_back(v);
    }
    paths.push_back(std::move(p));
  }
  return paths;
}


namespace {

// Leaves [lo, hi) of the weight-balanced tree; node ids follow WeightedSlp.
struct TreeBuilder {
  const std::vector<BigInt>& prefix;  // prefix[i] = w_0 + ... + w_{i-1}
  WeightedSlp& out;
  std::vector<std::size_t>& top;      // top[i]: highest node whose range starts at i
  std::vector<std::size_t>& end;      // end[node]: one past its last leaf

  std::size_t build(std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
      if (top[lo] == kUnset) top[lo] = lo;
      return lo;
    }
    // First m whose left part is at least as heavy as the right part; the
    // best split is m or m - 1.
    std::size_t a = lo + 1, b = hi - 1;
    auto left = [&](std::size_t m) { return BigInt(prefix[m] - prefix[lo]); };
    auto right = [&](std::size_t m) { return BigInt(prefix[hi] - prefix[m]); };
    while (a < b) {
      const std::size_t m = a + (b - a) / 2;
      if (left(m) >= right(m)) b = m;
      else a = m + 1;
    }
    std::size_t m = a;
    if (m > lo + 1 && std::max(left(m - 1), right(m - 1)) <= std::max(left(m), right(m))) --m;
    const std::size_t id = out.leaves + out.rules.size();
    out.rules.emplace_back();
    end.push_back(hi);
    if (top[lo] == kUnset) top[lo] = id;
    const std::size_t l = build(lo, m);
    const std::size_t r = build(m, hi);
    out.rules[id - out.leaves] = {l, r};
    return id;
  }

  static constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
};

WeightedSlp suffix_slp(const std::vector<BigInt>& w) {
  const std::size_t n = w.size();
  WeightedSlp out;
  out.leaves = n;
  std::vector<BigInt> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] <= 0) throw std::invalid_argument("weights must be positive");
    prefix[i + 1] = prefix[i] + w[i];
  }
  std::vector<std::size_t> top(n, TreeBuilder::kUnset), end;
  TreeBuilder tb{prefix, out, top, end};
  tb.build(0, n);
  auto end_of = [&](std::size_t id) { return id < n ? id + 1 : end[id - n]; };
  // Suffix i = (maximal subtree starting at i) followed by the suffix after it.
  out.handles.assign(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t t = top[i];
    const std::size_t e = end_of(t);
    if (e == n) {
      out.handles[i] = t;
    } else {
      out.handles[i] = out.leaves + out.rules.size();
      out.rules.push_back({t, out.handles[e]});
    }
  }
  return out;
}

}  // namespace

WeightedSlp weighted_slp(const std::vector<BigInt>& weights, WeightedSlp::Side side) {
  if (weights.empty()) throw std::invalid_argument("weighted_slp: empty sequence");
  if (side == WeightedSlp::Side::kSuffix) return suffix_slp(weights);
  // Prefixes are suffixes of the mirrored sequence.
  const std::size_t n = weights.size();
  WeightedSlp m = suffix_slp(std::vector<BigInt>(weights.rbegin(), weights.rend()));
  auto flip = [&](std::size_t id) { return id < n ? n - 1 - id : id; };
  for (auto& rhs : m.rules) {
    std::reverse(rhs.begin(), rhs.end());
    for (auto& x : rhs) x = flip(x);
  }
  std::reverse(m.handles.begin(), m.handles.end());
  for (auto& h : m.handles) h = flip(h);
  return m;
}

Grammar balance(const Grammar& g, BalanceStats* stats) {
  const Grammar h = normalize(g);
  const Dag d = to_dag(h);
  const PathCounts pc = path_counts(d);
  const std::vector<LambdaLabel> lambda = lambda_labels(pc);
  const std::vector<ScPath> paths = sc_decomposition(d, lambda);

  FlatGrammar out = to_flat(h);
  // Adds the fragment's internal rules; returns the variable for each id.
  auto place = [&](const WeightedSlp& w, const std::vector<VariableId>& leaves) {
    std::vector<VariableId> id(w.leaves + w.rules.size());
    for (std::size_t j = 0; j < w.leaves; ++j) id[j] = leaves[j];
    for (std::size_t j = 0; j < w.rules.size(); ++j) {
      id[w.leaves + j] = static_cast<VariableId>(out.rules.size());
      out.rules.emplace_back(std::vector<VariableId>{});
    }
    for (std::size_t j = 0; j < w.rules.size(); ++j) {
      std::vector<VariableId> rhs;
      for (std::size_t x : w.rules[j]) rhs.push_back(id[x]);
      out.rules[id[w.leaves + j]] = std::move(rhs);
    }
    return id;
  };

  std::size_t nontrivial = 0;
  for (const ScPath& p : paths) {
    const std::size_t len = p.off.size();
    if (len == 0) continue;
    ++nontrivial;
    std::vector<VariableId> left, right;  // L top-down, R bottom-up
    for (std::size_t i = 0; i < len; ++i)
      if (p.off_left[i]) left.push_back(p.off[i]);
    for (std::size_t i = len; i-- > 0;)
      if (!p.off_left[i]) right.push_back(p.off[i]);
    auto weights = [&](const std::vector<VariableId>& vs) {
      std::vector<BigInt> w;
      for (VariableId v : vs) w.push_back(h.length(v));
      return w;
    };
    std::vector<VariableId> suf, pre;
    if (!left.empty()) {
      const WeightedSlp w = weighted_slp(weights(left), WeightedSlp::Side::kSuffix);
      const auto id = place(w, left);
      for (std::size_t x : w.handles) suf.push_back(id[x]);
    }
    if (!right.empty()) {
      const WeightedSlp w = weighted_slp(weights(right), WeightedSlp::Side::kPrefix);
      const auto id = place(w, right);
      for (std::size_t x : w.handles) pre.push_back(id[x]);
    }
    // A_i = (suffix of L from the first left child at level >= i) A_p
    //       (prefix of R made of the right children at levels >= i).
    std::size_t lefts_above = 0;
    std::size_t rights_below = right.size();
    const VariableId bottom = p.nodes.back();
    for (std::size_t i = 0; i < len; ++i) {
      std::vector<VariableId> rhs;
      if (lefts_above < left.size()) rhs.push_back(suf[lefts_above]);
      rhs.push_back(bottom);
      if (rights_below > 0) rhs.push_back(pre[rights_below - 1]);
      out.rules[p.nodes[i]] = std::move(rhs);
      if (p.off_left[i]) ++lefts_above;
      else --rights_below;
    }
  }

  Grammar result = binarize(out);
  if (stats) {
    stats->old_size = g.size();
    stats->new_size = result.size();
    stats->old_height = g.height();
    stats->new_height = result.height();
    stats->sc_paths = nontrivial;
    stats->max_in_log = stats->max_out_log = 0;
    for (const auto& l : lambda) {
      stats->max_in_log = std::max(stats->max_in_log, l.in_log);
      stats->max_out_log = std::max(stats->max_out_log, l.out_log);
    }
  }
  return result;
}

}  // namespace islp
