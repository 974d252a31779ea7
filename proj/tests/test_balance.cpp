#include <cmath>
#include <functional>
#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "islp/balance.hpp"
#include "islp/corpora.hpp"

using namespace islp;

namespace {

std::vector<Grammar> corpus() {
  std::vector<Grammar> gs{islp::testing::sk5(), islp::testing::mixed_iter(), gen_sk(40),
                          gen_left_chain(100)};
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    RandomIslpParams p;
    p.seed = seed;
    p.max_length = 3000;
    gs.push_back(random_islp(p));
  }
  for (std::uint64_t seed = 1; seed <= 10; ++seed) gs.push_back(gen_random_unbalanced(seed, 500));
  return gs;
}

// Visits of each variable in the derivation tree, walking OUT(x) explicitly.
std::vector<BigInt> visit_counts(const Grammar& g) {
  std::vector<BigInt> c(g.num_vars(), 0);
  std::vector<VariableId> stack{g.start()};
  while (!stack.empty()) {
    const VariableId v = stack.back();
    stack.pop_back();
    ++c[v];
    const Rule& r = g.rule(v);
    if (const auto* b = std::get_if<Binary>(&r)) {
      stack.push_back(b->left);
      stack.push_back(b->right);
    } else if (std::holds_alternative<Iter>(r)) {
      for (VariableId x : unfold_iter(g, v, 1'000'000)) stack.push_back(x);
    }
  }
  return c;
}

std::size_t count_iters(const Grammar& g) {
  std::size_t k = 0;
  for (VariableId v = 0; v < g.num_vars(); ++v) k += std::holds_alternative<Iter>(g.rule(v));
  return k;
}

// Expansion of a fragment id, leaves rendered by `leaf`.
std::string fragment_text(const WeightedSlp& w, std::size_t id, const std::string& leaf) {
  if (w.is_leaf(id)) return std::string(1, leaf[id]);
  std::string s;
  for (std::size_t x : w.rhs(id)) s += fragment_text(w, x, leaf);
  return s;
}

// Largest depth - 2 (log2 W(handle) - log2 w(leaf)) over every handle and
// every leaf occurrence below it.
double depth_excess(const WeightedSlp& w, const std::vector<BigInt>& weights) {
  std::vector<double> wt(w.leaves + w.rules.size(), -1);
  std::function<double(std::size_t)> weight = [&](std::size_t id) -> double {
    if (w.is_leaf(id)) return static_cast<double>(weights[id]);
    if (wt[id] < 0) {
      double s = 0;
      for (std::size_t x : w.rhs(id)) s += weight(x);
      wt[id] = s;
    }
    return wt[id];
  };
  double worst = -1e300;
  for (std::size_t h : w.handles) {
    const double top = std::log2(weight(h));
    std::vector<std::pair<std::size_t, int>> stack{{h, 0}};
    while (!stack.empty()) {
      auto [id, d] = stack.back();
      stack.pop_back();
      if (w.is_leaf(id)) {
        worst = std::max(worst, d - 2 * (top - std::log2(weight(id))));
        continue;
      }
      for (std::size_t x : w.rhs(id)) stack.push_back({x, d + 1});
    }
  }
  return worst;
}

void check_fragment(const std::vector<BigInt>& weights, WeightedSlp::Side side) {
  const WeightedSlp w = weighted_slp(weights, side);
  const std::size_t n = weights.size();
  std::string leaf;
  for (std::size_t i = 0; i < n; ++i) leaf.push_back(static_cast<char>('!' + i % 90));
  REQUIRE(w.handles.size() == n);
  CHECK(w.rules.size() <= 3 * n);
  for (const auto& rhs : w.rules) CHECK(rhs.size() <= 4);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string want =
        side == WeightedSlp::Side::kSuffix ? leaf.substr(i) : leaf.substr(0, i + 1);
    CHECK(fragment_text(w, w.handles[i], leaf) == want);
  }
}

}  // namespace

TEST_CASE("binarize splits long rules and removes chains") {
  FlatGrammar f;
  f.rules = {Terminal{'b'}, Terminal{'c'}, Terminal{'d'}, std::vector<VariableId>{0, 1, 2}};
  f.names = {"B", "C", "D", "A"};
  f.start = 3;
  const Grammar g = binarize(f);
  const VariableId a = *g.find("A");
  const auto& top = std::get<Binary>(g.rule(a));
  CHECK(top.left == *g.find("B"));
  CHECK(std::get<Binary>(g.rule(top.right)) == Binary{*g.find("C"), *g.find("D")});
  CHECK(expand(g) == "bcd");

  FlatGrammar chain;
  chain.rules = {Terminal{'x'}, std::vector<VariableId>{0}, std::vector<VariableId>{1, 1},
                 std::vector<VariableId>{2}};
  chain.start = 3;
  const Grammar h = binarize(chain);
  CHECK(expand(h) == "xx");
  CHECK(h.num_vars() == 2);
}

TEST_CASE("binarize is the identity on binary grammars") {
  for (const Grammar& g : corpus()) CHECK(binarize(g) == g);
}

TEST_CASE("binarize preserves random flat grammars") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    FlatGrammar f;
    std::string alphabet = "xyz";
    for (char c : alphabet) f.rules.emplace_back(Terminal{static_cast<unsigned char>(c)});
    for (int j = 0; j < 15; ++j) {
      std::vector<VariableId> seq(rng.uniform(1, 5));
      for (auto& x : seq) x = static_cast<VariableId>(rng.uniform(0, f.rules.size() - 1));
      f.rules.emplace_back(std::move(seq));
    }
    f.start = static_cast<VariableId>(f.rules.size() - 1);
    // Oracle: direct recursive expansion of the flat rules.
    std::function<std::string(VariableId)> text = [&](VariableId v) -> std::string {
      if (const auto* t = std::get_if<Terminal>(&f.rules[v])) return std::string(1, t->symbol);
      std::string s;
      for (VariableId x : std::get<std::vector<VariableId>>(f.rules[v])) s += text(x);
      return s;
    };
    const std::string want = text(f.start);
    if (want.size() > 100000) continue;
    CHECK(expand(binarize(f)) == want);
  }
}

TEST_CASE("normalize rewrites single-block rules") {
  const Grammar g = parse_grammar(
      "a = 'a'\nb = 'b'\nX = prod i in 3..3 { a^(i^2) b^(i^0) }\n"
      "S = prod i in 1..4 { X^(i^0) b^(i^1) }\nstart S\n");
  const Grammar h = normalize(g);
  CHECK(expand(h) == expand(g));
  for (VariableId v = 0; v < h.num_vars(); ++v)
    if (const auto* it = std::get_if<Iter>(&h.rule(v))) CHECK(it->k1 != it->k2);
  CHECK(normalize(islp::testing::sk5()) == islp::testing::sk5());
  for (const Grammar& c : corpus()) CHECK(expand(normalize(c)) == expand(c));
}

TEST_CASE("DAG multiplicities") {
  const Grammar run = parse_grammar("b = 'b'\nA = prod i in 1..3 { b^(i^0) }\nstart A\n");
  const Dag dr = to_dag(run);
  CHECK(dr.multiplicity(run.start(), *run.find("b")) == 3);

  const Grammar s5 = islp::testing::sk5();
  const Dag d = to_dag(s5);
  CHECK(d.multiplicity(s5.start(), *s5.find("A")) == 15);
  CHECK(d.multiplicity(s5.start(), *s5.find("B")) == 5);

  const Grammar bin = parse_grammar("x = 'x'\ny = 'y'\nA = x y\nstart A\n");
  const Dag db = to_dag(bin);
  CHECK(db.multiplicity(bin.start(), *bin.find("x")) == 1);
  CHECK(db.multiplicity(bin.start(), *bin.find("y")) == 1);

  // Against direct counts in OUT(x).
  for (const Grammar& g : corpus()) {
    const Dag dg = to_dag(g);
    for (VariableId v : dg.topo) {
      if (!std::holds_alternative<Iter>(g.rule(v))) continue;
      std::map<VariableId, BigInt> direct;
      for (VariableId x : unfold_iter(g, v, 1'000'000)) ++direct[x];
      for (const auto& [x, m] : direct) CHECK(dg.multiplicity(v, x) == m);
    }
  }
}

TEST_CASE("path counts") {
  const Grammar one = parse_grammar("a = 'a'\nstart a\n");
  const PathCounts p1 = path_counts(to_dag(one));
  CHECK(p1.to_sinks[one.start()] == 1);
  CHECK(p1.from_root[one.start()] == 1);

  const Grammar s5 = islp::testing::sk5();
  CHECK(path_counts(to_dag(s5)).to_sinks[s5.start()] == 20);

  for (const Grammar& g : corpus()) {
    const PathCounts pc = path_counts(to_dag(g));
    CHECK(pc.to_sinks[g.start()] == g.n());
    for (VariableId v = 0; v < g.num_vars(); ++v) CHECK(pc.to_sinks[v] == g.length(v));
    if (g.n() <= 3000) CHECK(pc.from_root == visit_counts(g));
  }
}

TEST_CASE("lambda labels use exact bit lengths") {
  PathCounts pc;
  pc.from_root = {BigInt(1), BigInt(7), BigInt(8), BigInt(1) << 200};
  pc.to_sinks = {(BigInt(1) << 200) - 1, BigInt(2), BigInt(1), BigInt(1)};
  const auto l = lambda_labels(pc);
  CHECK(l[0] == LambdaLabel{0, 199});
  CHECK(l[1] == LambdaLabel{2, 1});
  CHECK(l[2] == LambdaLabel{3, 0});
  CHECK(l[3] == LambdaLabel{200, 0});
}

TEST_CASE("SC decomposition on a small chain") {
  const Grammar g = parse_grammar(
      "a = 'a'\nb = 'b'\nc = 'c'\nC = a b\nA = C c\nS = A b\nstart S\n");
  const Dag d = to_dag(g);
  const auto lambda = lambda_labels(path_counts(d));
  const auto paths = sc_decomposition(d, lambda);
  std::map<VariableId, int> seen;
  for (const auto& p : paths)
    for (VariableId v : p.nodes) ++seen[v];
  CHECK(seen.size() == g.num_vars());
  for (const auto& [v, k] : seen) CHECK(k == 1);
}

TEST_CASE("SC decomposition invariants on the corpus") {
  Rng rng(5);
  for (const Grammar& g0 : corpus()) {
    const Grammar g = normalize(g0);
    const Dag d = to_dag(g);
    const auto lambda = lambda_labels(path_counts(d));
    std::vector<int> out(g.num_vars(), 0), in(g.num_vars(), 0);
    for (VariableId v : d.topo)
      for (const auto& e : d.edges[v])
        if (is_scd_edge(lambda, v, e)) {
          ++out[v];
          ++in[e.target];
          CHECK_FALSE(std::holds_alternative<Iter>(g.rule(v)));
        }
    for (VariableId v : d.topo) {
      CHECK(out[v] <= 1);
      CHECK(in[v] <= 1);
    }
    const auto paths = sc_decomposition(d, lambda);
    std::size_t covered = 0, edges = 0;
    for (const auto& p : paths) {
      covered += p.nodes.size();
      edges += p.off.size();
      CHECK(p.off.size() + 1 == p.nodes.size());
      for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
        CHECK(lambda[p.nodes[i]] == lambda[p.nodes[i + 1]]);
    }
    CHECK(covered == d.topo.size());
    CHECK(edges <= g.num_vars());

    // Random root-to-sink walks cross at most 2 log2 n non-E_scd edges.
    const double bound = 2 * static_cast<double>(boost::multiprecision::msb(g.n()) + 1);
    for (int walk = 0; walk < 100; ++walk) {
      VariableId v = d.root;
      int crossings = 0;
      while (!d.edges[v].empty()) {
        const auto& e = d.edges[v][rng.uniform(0, d.edges[v].size() - 1)];
        crossings += !is_scd_edge(lambda, v, e);
        v = e.target;
      }
      CHECK(crossings <= std::log2(static_cast<double>(g.n())) * 2 + 1e-9);
      CHECK(crossings <= bound);
    }
  }
}

TEST_CASE("weighted SLP: single symbol") {
  const WeightedSlp w = weighted_slp({BigInt(5)}, WeightedSlp::Side::kSuffix);
  CHECK(w.rules.empty());
  CHECK(w.handles == std::vector<std::size_t>{0});
  CHECK(depth_excess(w, {BigInt(5)}) <= 0);
}

TEST_CASE("weighted SLP: uniform weights") {
  const std::vector<BigInt> weights(8, BigInt(1));
  for (auto side : {WeightedSlp::Side::kSuffix, WeightedSlp::Side::kPrefix}) {
    check_fragment(weights, side);
    const WeightedSlp w = weighted_slp(weights, side);
    // Any leaf below any handle sits at depth <= 3 + 2 * 3.
    CHECK(depth_excess(w, weights) <= 3);
  }
}

TEST_CASE("weighted SLP: random weights") {
  Rng rng(11);
  double worst = -1e300;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<BigInt> weights(rng.uniform(1, 200));
    for (auto& x : weights) x = rng.uniform(1, std::uint64_t(1) << 20);
    for (auto side : {WeightedSlp::Side::kSuffix, WeightedSlp::Side::kPrefix}) {
      check_fragment(weights, side);
      worst = std::max(worst, depth_excess(weighted_slp(weights, side), weights));
    }
  }
  MESSAGE("largest depth excess " << worst);
  CHECK(worst <= 3 + 1);
}

TEST_CASE("balance preserves the text and keeps iteration rules") {
  for (const Grammar& g : corpus()) {
    BalanceStats st;
    const Grammar b = balance(g, &st);
    CHECK(expand(b) == expand(g));
    CHECK(count_iters(b) == count_iters(normalize(g)));
    CHECK(st.old_size == g.size());
    CHECK(st.new_size == b.size());
    CHECK(st.new_height == b.height());
    CHECK(st.max_out_log == boost::multiprecision::msb(g.n()));
  }
}

TEST_CASE("balance flattens a left chain") {
  const Grammar g = gen_left_chain(256);
  BalanceStats st;
  const Grammar b = balance(g, &st);
  CHECK(expand(b) == std::string(256, 'a'));
  CHECK(g.height() == 255);
  CHECK(b.height() <= 40 * 8);
  CHECK(b.height() <= 2 * 8 + 2);
  CHECK(st.sc_paths >= 1);
  CHECK(b.size() <= 2 * g.size());
}

TEST_CASE("balancing twice does not blow up height or size") {
  for (const Grammar& g : corpus()) {
    const Grammar b = balance(g);
    const Grammar bb = balance(b);
    CHECK(expand(bb) == expand(g));
    CHECK(bb.height() <= 2 * b.height() + 2);
    CHECK(bb.size() <= 2 * b.size());
  }
}

TEST_CASE("balance on a mixed-degree iteration rule") {
  const Grammar g = islp::testing::mixed_iter();
  const Grammar b = balance(g);
  CHECK(expand(b) == expand(g));
  CHECK(b.size() <= 4 * g.size());
}
