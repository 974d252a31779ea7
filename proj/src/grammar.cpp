#include "islp/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace islp {

namespace {

std::vector<VariableId> children_of(const Rule& r) {
  std::vector<VariableId> out;
  if (const auto* b = std::get_if<Binary>(&r)) {
    out = {b->left, b->right};
  } else if (const auto* it = std::get_if<Iter>(&r)) {
    out.reserve(it->factors.size());
    for (const auto& f : it->factors) out.push_back(f.var);
  }
  return out;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

}  // namespace

std::size_t rule_size(const Rule& r) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Terminal>) return 1;
        else if constexpr (std::is_same_v<T, Binary>) return 2;
        else return 2 + 2 * x.factors.size();
      },
      r);
}

BigInt power_sum_direct(BlockIndex lo, BlockIndex hi, Exponent c) {
  BigInt sum = 0;
  for (BlockIndex i = lo; i <= hi; ++i) {
    sum += boost::multiprecision::pow(BigInt(i), c);
    if (i == hi) break;
  }
  return sum;
}

std::size_t to_size(const BigInt& v, const char* what) {
  if (v < 0 || v > BigInt(std::numeric_limits<std::size_t>::max()))
    throw RangeError(std::string(what) + " does not fit in a machine word");
  return static_cast<std::size_t>(v);
}

// ---------------------------------------------------------------------------
// GrammarBuilder

VariableId GrammarBuilder::add(std::string name, Rule rule) {
  names_.push_back(std::move(name));
  rules_.push_back(std::move(rule));
  return static_cast<VariableId>(rules_.size() - 1);
}

VariableId GrammarBuilder::import(const Grammar& g, bool keep_names) {
  const auto offset = static_cast<VariableId>(rules_.size());
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    Rule r = g.rule(v);
    if (auto* b = std::get_if<Binary>(&r)) {
      b->left += offset;
      b->right += offset;
    } else if (auto* it = std::get_if<Iter>(&r)) {
      for (auto& f : it->factors) f.var += offset;
    }
    add(keep_names ? g.name(v) : std::string(), std::move(r));
  }
  return offset;
}

Grammar GrammarBuilder::build(bool prune) && {
  const std::size_t count = rules_.size();
  if (count == 0) throw GrammarError("grammar has no rules");
  if (!start_) throw GrammarError("missing start symbol");
  if (*start_ >= count) throw GrammarError("start symbol out of range");

  for (std::size_t v = 0; v < count; ++v) {
    const Rule& r = rules_[v];
    for (VariableId c : children_of(r))
      if (c >= count) throw GrammarError("rule references undefined variable");
    if (const auto* it = std::get_if<Iter>(&r)) {
      if (it->k1 == 0 || it->k2 == 0)
        throw GrammarError("iteration bounds must be >= 1");
      if (it->factors.empty()) throw GrammarError("iteration rule has no factors");
    }
  }

  // Iterative DFS from the start: reachability, cycle detection, postorder.
  enum : std::uint8_t { kWhite, kGrey, kBlack };
  std::vector<std::uint8_t> color(count, kWhite);
  std::vector<VariableId> post;
  post.reserve(count);
  struct Frame {
    VariableId v;
    std::vector<VariableId> kids;
    std::size_t next;
  };
  std::vector<Frame> stack;
  stack.push_back({*start_, children_of(rules_[*start_]), 0});
  color[*start_] = kGrey;
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < f.kids.size()) {
      VariableId c = f.kids[f.next++];
      if (color[c] == kGrey) throw GrammarError("cycle detected in rule graph");
      if (color[c] == kWhite) {
        color[c] = kGrey;
        stack.push_back({c, children_of(rules_[c]), 0});
      }
    } else {
      color[f.v] = kBlack;
      post.push_back(f.v);
      stack.pop_back();
    }
  }

  std::vector<VariableId> remap(count);
  if (post.size() != count) {
    if (!prune) throw GrammarError("grammar contains unreachable variables");
  }
  VariableId next_id = 0;
  for (std::size_t v = 0; v < count; ++v)
    remap[v] = color[v] == kBlack ? next_id++ : VariableId(-1);

  Grammar g;
  g.rules_.reserve(next_id);
  g.names_.reserve(next_id);
  for (std::size_t v = 0; v < count; ++v) {
    if (color[v] != kBlack) continue;
    Rule r = std::move(rules_[v]);
    if (auto* b = std::get_if<Binary>(&r)) {
      b->left = remap[b->left];
      b->right = remap[b->right];
    } else if (auto* it = std::get_if<Iter>(&r)) {
      for (auto& fct : it->factors) fct.var = remap[fct.var];
    }
    g.rules_.push_back(std::move(r));
    g.names_.push_back(std::move(names_[v]));
  }
  g.start_ = remap[*start_];
  g.topo_.reserve(post.size());
  for (VariableId v : post) g.topo_.push_back(remap[v]);

  // Names: keep given ones, synthesize the rest.
  std::unordered_set<std::string> used;
  for (const auto& nm : g.names_) {
    if (nm.empty()) continue;
    if (!valid_name(nm)) throw GrammarError("invalid variable name '" + nm + "'");
    if (!used.insert(nm).second) throw GrammarError("duplicate variable name '" + nm + "'");
  }
  std::size_t fresh = 0;
  for (VariableId v = 0; v < g.rules_.size(); ++v) {
    if (!g.names_[v].empty()) continue;
    const Rule& r = g.rules_[v];
    std::string base = "X";
    if (const auto* t = std::get_if<Terminal>(&r); t && std::isalpha(t->symbol))
      base = std::string("T_") + static_cast<char>(t->symbol) + "_";
    std::string nm;
    do nm = base + std::to_string(fresh++);
    while (used.count(nm));
    used.insert(nm);
    g.names_[v] = std::move(nm);
  }
  for (VariableId v = 0; v < g.names_.size(); ++v) g.by_name_.emplace(g.names_[v], v);

  g.lengths_.assign(g.rules_.size(), 0);
  g.heights_.assign(g.rules_.size(), 0);
  for (VariableId v : g.topo_) {
    const Rule& r = g.rules_[v];
    if (std::holds_alternative<Terminal>(r)) {
      g.lengths_[v] = 1;
    } else if (const auto* b = std::get_if<Binary>(&r)) {
      g.lengths_[v] = g.lengths_[b->left] + g.lengths_[b->right];
      g.heights_[v] = 1 + std::max(g.heights_[b->left], g.heights_[b->right]);
    } else {
      const auto& it = std::get<Iter>(r);
      BigInt len = 0;
      std::size_t h = 0;
      std::unordered_map<Exponent, BigInt> sums;
      for (const auto& f : it.factors) {
        auto [pos, fresh_c] = sums.try_emplace(f.exp);
        if (fresh_c) pos->second = power_sum_direct(it.lo(), it.hi(), f.exp);
        len += g.lengths_[f.var] * pos->second;
        h = std::max(h, g.heights_[f.var]);
      }
      g.lengths_[v] = std::move(len);
      g.heights_[v] = 1 + h;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Grammar

std::optional<VariableId> Grammar::find(std::string_view nm) const {
  auto it = by_name_.find(std::string(nm));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t Grammar::size() const {
  std::size_t s = 0;
  for (const auto& r : rules_) s += rule_size(r);
  return s;
}

std::size_t Grammar::height() const { return heights_.at(start_); }

Exponent Grammar::max_degree() const {
  Exponent d = 0;
  for (const auto& r : rules_)
    if (const auto* it = std::get_if<Iter>(&r))
      for (const auto& f : it->factors) d = std::max(d, f.exp);
  return d;
}

// ---------------------------------------------------------------------------
// Oracles

namespace {

template <typename Emit>
void for_each_unfolded(const Iter& it, Emit&& emit) {
  const BlockIndex count = it.block_count();
  for (BlockIndex j = 0; j < count; ++j) {
    const BlockIndex i = it.descending() ? it.k1 - j : it.k1 + j;
    for (const auto& f : it.factors) {
      BigInt reps = boost::multiprecision::pow(BigInt(i), f.exp);
      emit(f.var, reps);
    }
  }
}

}  // namespace

std::string expand(const Grammar& g, VariableId a, std::size_t limit) {
  if (g.length(a) > limit)
    throw RangeError("expansion length " + g.length(a).str() +
                     " exceeds oracle limit " + std::to_string(limit));
  std::string out;
  out.reserve(to_size(g.length(a)));
  std::vector<VariableId> stack{a};
  std::vector<VariableId> seq;
  while (!stack.empty()) {
    const VariableId v = stack.back();
    stack.pop_back();
    const Rule& r = g.rule(v);
    if (const auto* t = std::get_if<Terminal>(&r)) {
      out.push_back(static_cast<char>(t->symbol));
    } else if (const auto* b = std::get_if<Binary>(&r)) {
      stack.push_back(b->right);
      stack.push_back(b->left);
    } else {
      seq.clear();
      for_each_unfolded(std::get<Iter>(r), [&](VariableId c, const BigInt& reps) {
        seq.insert(seq.end(), static_cast<std::size_t>(reps), c);
      });
      stack.insert(stack.end(), seq.rbegin(), seq.rend());
    }
  }
  return out;
}

std::vector<VariableId> unfold_iter(const Grammar& g, VariableId a, std::size_t limit) {
  const auto* it = std::get_if<Iter>(&g.rule(a));
  if (!it) throw GrammarError("unfold_iter: variable is not an iteration rule");
  std::vector<VariableId> out;
  for_each_unfolded(*it, [&](VariableId c, const BigInt& reps) {
    if (BigInt(out.size()) + reps > limit)
      throw RangeError("unfolded iteration exceeds oracle limit");
    out.insert(out.end(), static_cast<std::size_t>(reps), c);
  });
  return out;
}

Grammar unfold_all(const Grammar& g, std::size_t limit) {
  GrammarBuilder b;
  b.import(g);
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    if (!std::holds_alternative<Iter>(g.rule(v))) continue;
    auto seq = unfold_iter(g, v, limit);
    if (seq.size() == 1) {
      b.rule(v) = Iter{1, 1, {Factor{seq[0], 0}}};
      continue;
    }
    VariableId acc = seq[0];
    for (std::size_t j = 1; j + 1 < seq.size(); ++j) acc = b.add_binary(acc, seq[j]);
    b.rule(v) = Binary{acc, seq.back()};
  }
  b.set_start(g.start());
  return std::move(b).build();
}

}  // namespace islp
