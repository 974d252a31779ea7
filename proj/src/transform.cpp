#include "islp/transform.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "islp/access.hpp"
#include "islp/poly.hpp"

namespace islp {

Grammar clamp_degree(const Grammar& g, std::vector<VariableId>* flagged) {
  const std::size_t log_n = boost::multiprecision::msb(g.n());
  GrammarBuilder b;
  b.import(g, /*keep_names=*/true);
  bool changed = false;
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    auto* it = std::get_if<Iter>(&b.rule(v));
    if (!it) continue;
    if (it->hi() == 1) {
      // Single block i = 1: every i^{c_j} is 1 regardless of c_j.
      for (auto& f : it->factors) {
        changed |= f.exp != 0;
        f.exp = 0;
      }
      continue;
    }
    const bool over = std::any_of(it->factors.begin(), it->factors.end(),
                                  [&](const Factor& f) { return f.exp > log_n; });
    if (over && flagged) flagged->push_back(v);
  }
  if (!changed) return g;
  b.set_start(g.start());
  return std::move(b).build(/*prune=*/false);
}

Grammar reverse(const Grammar& g) {
  GrammarBuilder b;
  b.import(g, /*keep_names=*/true);
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    Rule& r = b.rule(v);
    if (auto* bin = std::get_if<Binary>(&r)) {
      std::swap(bin->left, bin->right);
    } else if (auto* it = std::get_if<Iter>(&r)) {
      std::reverse(it->factors.begin(), it->factors.end());
      std::swap(it->k1, it->k2);
    }
  }
  b.set_start(g.start());
  return std::move(b).build(/*prune=*/false);
}

std::map<unsigned char, std::string> parse_morphism(std::string_view text) {
  std::map<unsigned char, std::string> phi;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = text.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) {
      if (end == text.size()) break;
      throw GrammarError("empty morphism entry");
    }
    if (item.size() < 2 || item[1] != '=')
      throw GrammarError("morphism entry must look like 'a=xyz': " + std::string(item));
    phi[static_cast<unsigned char>(item[0])] = std::string(item.substr(2));
  }
  return phi;
}

Grammar apply_morphism(const Grammar& g, const std::map<unsigned char, std::string>& phi) {
  std::set<unsigned char> used;
  for (VariableId v = 0; v < g.num_vars(); ++v)
    if (const auto* t = std::get_if<Terminal>(&g.rule(v))) used.insert(t->symbol);

  GrammarBuilder b;
  b.import(g, /*keep_names=*/true);

  std::map<unsigned char, VariableId> leaves;
  auto leaf = [&](unsigned char c) {
    auto [it, fresh] = leaves.try_emplace(c, 0);
    if (fresh) it->second = b.add_terminal(c);
    return it->second;
  };
  // Balanced binary tree over image[lo, hi).
  auto tree = [&](auto&& self, const std::string& image, std::size_t lo,
                  std::size_t hi) -> VariableId {
    if (hi - lo == 1) return leaf(static_cast<unsigned char>(image[lo]));
    const std::size_t mid = lo + (hi - lo) / 2;
    return b.add_binary(self(self, image, lo, mid), self(self, image, mid, hi));
  };

  std::map<unsigned char, Rule> replacement;
  for (unsigned char a : used) {
    auto it = phi.find(a);
    const std::string image = it == phi.end() ? std::string(1, static_cast<char>(a)) : it->second;
    if (image.empty())
      throw GrammarError(std::string("morphism maps used character '") + static_cast<char>(a) +
                         "' to the empty string");
    if (image.size() == 1) {
      replacement[a] = Terminal{static_cast<unsigned char>(image[0])};
    } else {
      const std::size_t mid = image.size() / 2;
      replacement[a] = Binary{tree(tree, image, 0, mid), tree(tree, image, mid, image.size())};
    }
  }
  for (VariableId v = 0; v < g.num_vars(); ++v)
    if (const auto* t = std::get_if<Terminal>(&g.rule(v))) b.rule(v) = replacement.at(t->symbol);
  b.set_start(g.start());
  return std::move(b).build();
}

// ---------------------------------------------------------------------------
// Single-character edits

namespace {

struct PathStep {
  VariableId v;
  bool went_left = false;  // binary rules
  BlockIndex block = 0;    // iteration rules: i
  std::size_t factor = 0;  // r (1-based)
  BigInt copy{};           // q (1-based copy of B_r inside B_r^{i^{c_r}})
};

BlockIndex to_block(const BigInt& v) {
  if (v < 1 || v > BigInt(std::numeric_limits<BlockIndex>::max()))
    throw RangeError("iteration bound does not fit in 64 bits");
  return static_cast<BlockIndex>(v);
}

class EditBuilder {
 public:
  explicit EditBuilder(const Grammar& g) : g_(g) { b_.import(g, /*keep_names=*/true); }

  GrammarBuilder& builder() { return b_; }

  // A product piece, or the single variable it denotes when it has one block,
  // one factor and one copy.
  std::optional<VariableId> product(BlockIndex k1, BlockIndex k2, std::vector<Factor> fs) {
    if (fs.empty()) return std::nullopt;
    if (k1 == k2 && fs.size() == 1 && (k1 == 1 || fs[0].exp == 0)) return fs[0].var;
    return b_.add_iter(k1, k2, std::move(fs));
  }

  std::optional<VariableId> concat(const std::vector<std::optional<VariableId>>& parts) {
    std::optional<VariableId> acc;
    for (const auto& p : parts) {
      if (!p) continue;
      acc = acc ? b_.add_binary(*acc, *p) : *p;
    }
    return acc;
  }

  std::optional<VariableId> rebuild_iter(const PathStep& s, std::optional<VariableId> replaced) {
    const Iter& it = std::get<Iter>(g_.rule(s.v));
    const BlockIndex i = s.block;
    const std::size_t r = s.factor;
    const Factor& fr = it.factors[r - 1];
    const BlockIndex copies = to_block(boost::multiprecision::pow(BigInt(i), fr.exp));
    const BlockIndex q = to_block(s.copy);

    std::optional<VariableId> before, after;
    if (!it.descending()) {
      if (i > it.k1) before = product(it.k1, i - 1, it.factors);
      if (i < it.k2) after = product(i + 1, it.k2, it.factors);
    } else {
      if (i < it.k1) before = product(it.k1, i + 1, it.factors);
      if (i > it.k2) after = product(i - 1, it.k2, it.factors);
    }
    std::vector<Factor> head(it.factors.begin(), it.factors.begin() + (r - 1));
    std::vector<Factor> tail(it.factors.begin() + r, it.factors.end());
    std::optional<VariableId> left_copies, right_copies;
    if (q > 1) left_copies = product(1, q - 1, {Factor{fr.var, 0}});
    if (q < copies) right_copies = product(q + 1, copies, {Factor{fr.var, 0}});
    return concat({before, product(i, i, std::move(head)), left_copies, replaced, right_copies,
                   product(i, i, std::move(tail)), after});
  }

 private:
  const Grammar& g_;
  GrammarBuilder b_;
};

}  // namespace

Grammar edit(const Grammar& g, const EditOp& op) {
  if (op.position < 1 || op.position > g.n())
    throw RangeError("edit position " + op.position.str() + " outside [1.." + g.n().str() + "]");

  auto table = faulhaber_table(g.max_degree());
  std::vector<PathStep> path;
  VariableId v = g.start();
  BigInt pos = op.position;
  for (;;) {
    const Rule& rule = g.rule(v);
    if (std::holds_alternative<Terminal>(rule)) break;
    if (const auto* bin = std::get_if<Binary>(&rule)) {
      PathStep s{v};
      const BigInt& left = g.length(bin->left);
      s.went_left = pos <= left;
      if (!s.went_left) pos -= left;
      v = s.went_left ? bin->left : bin->right;
      path.push_back(std::move(s));
      continue;
    }
    const IterIndex idx(g, v, table);
    const BlockHit hit = block_search(idx, pos);
    const FactorHit fh = factor_search(idx, hit.block, hit.remainder, hit.block_length);
    const BigInt& len = idx.factor_length(fh.factor);
    PathStep s{v};
    s.block = to_block(hit.block);
    s.factor = fh.factor;
    s.copy = (fh.offset + len - 1) / len;
    path.push_back(std::move(s));
    pos = (fh.offset - 1) % len + 1;
    v = idx.factor(fh.factor);
  }

  EditBuilder eb(g);
  GrammarBuilder& b = eb.builder();
  std::optional<VariableId> cur;
  switch (op.kind) {
    case EditOp::Kind::kSubstitute: cur = b.add_terminal(op.symbol); break;
    case EditOp::Kind::kInsertBefore: cur = b.add_binary(b.add_terminal(op.symbol), v); break;
    case EditOp::Kind::kInsertAfter: cur = b.add_binary(v, b.add_terminal(op.symbol)); break;
    case EditOp::Kind::kDelete: cur = std::nullopt; break;
  }
  for (auto s = path.rbegin(); s != path.rend(); ++s) {
    const Rule& rule = g.rule(s->v);
    if (const auto* bin = std::get_if<Binary>(&rule)) {
      cur = s->went_left ? eb.concat({cur, bin->right}) : eb.concat({bin->left, cur});
    } else {
      cur = eb.rebuild_iter(*s, cur);
    }
  }
  if (!cur) throw GrammarError("edit would leave the text empty");
  b.set_start(*cur);
  return std::move(b).build();
}

}  // namespace islp
