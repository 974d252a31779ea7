#include "islp/access.hpp"

#include "islp/transform.hpp"

namespace islp {

namespace {

// Values of a monotone cumulative function already known during one search.
class Memo {
 public:
  const BigInt* find(const BigInt& x) const {
    for (const auto& [k, v] : entries_)
      if (k == x) return &v;
    return nullptr;
  }
  void put(BigInt x, BigInt v) { entries_.emplace_back(std::move(x), std::move(v)); }

 private:
  std::vector<std::pair<BigInt, BigInt>> entries_;
};

// Successor search for the smallest j in [1..count] with cum(j) >= l, given
// cum(0) < l <= cum(count). Each probe at mid also checks the neighbour on the
// answer side, so the search stops as soon as it brackets the answer.
template <typename Cum>
BigInt successor_search(const BigInt& count, const BigInt& l, Cum&& cum) {
  BigInt a = 1, b = count;
  while (a < b) {
    const BigInt mid = (a - 1 + b) / 2;
    if (cum(mid) < l) {
      a = mid + 1;
      if (a < b) {
        if (l <= cum(a)) b = a;
        else a = a + 1;
      }
    } else {
      b = mid;
      if (a < b) {
        if (cum(BigInt(mid - 1)) < l) a = mid;
        else b = mid - 1;
      }
    }
  }
  return a;
}

BigInt one_based_residue(const BigInt& off, const BigInt& len) {
  return (off - 1) % len + 1;
}

}  // namespace

BlockHit block_search(const IterIndex& idx, const BigInt& l, QueryStats* stats) {
  const BigInt lo = idx.lo(), hi = idx.hi();
  const BigInt count = hi - lo + 1;
  const BigInt& total = idx.total_length();
  if (l < 1 || l > total) throw RangeError("block_search: position out of range");

  Memo memo;
  memo.put(0, 0);
  memo.put(count, total);
  auto cum = [&](const BigInt& j) -> BigInt {
    if (const BigInt* v = memo.find(j)) return *v;
    const BigInt k = idx.descending() ? BigInt(hi - j) : BigInt(lo - 1 + j);
    const BigInt fp = idx.f_plus(k);
    if (stats) {
      ++stats->evaluations;
      if (stats->probes) stats->probes->push_back({Probe::Fn::kFPlus, k, 0, fp});
    }
    BigInt v = idx.descending() ? BigInt(total - fp) : fp;
    memo.put(j, v);
    return v;
  };

  const BigInt j = successor_search(count, l, cum);
  const BigInt before = cum(j - 1);
  const BigInt upto = cum(j);
  BigInt i = idx.descending() ? BigInt(hi - j + 1) : BigInt(lo - 1 + j);
  return {std::move(i), l - before, upto - before};
}

FactorHit factor_search(const IterIndex& idx, const BigInt& i, const BigInt& rem,
                        const BigInt& block_length, QueryStats* stats) {
  const BigInt count = idx.t();
  Memo memo;
  memo.put(0, 0);
  if (block_length >= 0) memo.put(count, block_length);
  auto cum = [&](const BigInt& r) -> BigInt {
    if (const BigInt* v = memo.find(r)) return *v;
    const auto rr = static_cast<std::size_t>(r);
    BigInt v = idx.f_r(rr, i);
    if (stats) {
      ++stats->evaluations;
      if (stats->probes) stats->probes->push_back({Probe::Fn::kFr, i, rr, v});
    }
    memo.put(r, v);
    return v;
  };
  if (rem < 1 || rem > cum(count)) throw RangeError("factor_search: offset out of range");
  const BigInt r = successor_search(count, rem, cum);
  return {static_cast<std::size_t>(r), rem - cum(BigInt(r - 1))};
}

// ---------------------------------------------------------------------------

struct AccessContext::Frame {
  VariableId v;
  std::uint8_t stage = 0;  // binary: 0 none, 1 left pushed, 2 both pushed
  BigInt block{};          // iteration: text-order block ordinal j (1-based)
  std::size_t factor = 0;  // r
  BigInt copies{};         // copies of B_r already started
  BigInt reps{};           // i^{c_r}
};

AccessContext::AccessContext(const Grammar& g)
    : grammar_(clamp_degree(g)), table_(faulhaber_table(grammar_.max_degree())) {
  indexes_.resize(grammar_.num_vars());
  for (VariableId v = 0; v < grammar_.num_vars(); ++v)
    if (std::holds_alternative<Iter>(grammar_.rule(v)))
      indexes_[v] = std::make_unique<IterIndex>(grammar_, v, table_);
}

const IterIndex* AccessContext::index(VariableId v) const { return indexes_.at(v).get(); }

char AccessContext::access(const BigInt& l, QueryStats* stats) const {
  if (l < 1 || l > n())
    throw RangeError("position " + l.str() + " outside [1.." + n().str() + "]");
  VariableId v = grammar_.start();
  BigInt pos = l;
  for (;;) {
    const Rule& rule = grammar_.rule(v);
    if (const auto* t = std::get_if<Terminal>(&rule)) return static_cast<char>(t->symbol);
    if (stats) ++stats->levels;
    if (const auto* b = std::get_if<Binary>(&rule)) {
      const BigInt& left = grammar_.length(b->left);
      if (pos <= left) {
        v = b->left;
      } else {
        pos -= left;
        v = b->right;
      }
      continue;
    }
    const IterIndex& idx = *indexes_[v];
    const BlockHit hit = block_search(idx, pos, stats);
    const FactorHit fh = factor_search(idx, hit.block, hit.remainder, hit.block_length, stats);
    const BigInt child = one_based_residue(fh.offset, idx.factor_length(fh.factor));
    if (stats && stats->trace)
      stats->trace->push_back({v, pos, hit.block, fh.factor, fh.offset, child});
    v = idx.factor(fh.factor);
    pos = child;
  }
}

std::string AccessContext::extract(const BigInt& l, const BigInt& lambda) const {
  std::string out;
  if (lambda > 0) out.reserve(to_size(lambda, "extraction length"));
  extract(l, lambda, [&](char c) { out.push_back(c); });
  return out;
}

void AccessContext::extract(const BigInt& l, const BigInt& lambda, const Sink& out) const {
  if (lambda < 0) throw RangeError("negative extraction length");
  if (l < 1 || l + lambda - 1 > n())
    throw RangeError("range [" + l.str() + ", +" + lambda.str() + ") outside text of length " +
                     n().str());
  if (lambda == 0) return;

  // Descend as in access(), leaving on the stack the state each rule is in
  // once T[l] has been produced.
  std::vector<Frame> stack;
  VariableId v = grammar_.start();
  BigInt pos = l;
  for (;;) {
    const Rule& rule = grammar_.rule(v);
    if (const auto* t = std::get_if<Terminal>(&rule)) {
      out(static_cast<char>(t->symbol));
      break;
    }
    if (const auto* b = std::get_if<Binary>(&rule)) {
      const BigInt& left = grammar_.length(b->left);
      if (pos <= left) {
        stack.push_back({v, 1});
        v = b->left;
      } else {
        stack.push_back({v, 2});
        pos -= left;
        v = b->right;
      }
      continue;
    }
    const IterIndex& idx = *indexes_[v];
    const BlockHit hit = block_search(idx, pos);
    const FactorHit fh = factor_search(idx, hit.block, hit.remainder, hit.block_length);
    const BigInt& len = idx.factor_length(fh.factor);
    Frame f{v};
    f.block = idx.descending() ? BigInt(BigInt(idx.hi()) - hit.block + 1)
                               : BigInt(hit.block - idx.lo() + 1);
    f.factor = fh.factor;
    f.copies = (fh.offset + len - 1) / len;  // 1-based copy index q
    f.reps = boost::multiprecision::pow(hit.block, idx.C(fh.factor));
    stack.push_back(std::move(f));
    pos = one_based_residue(fh.offset, len);
    v = idx.factor(fh.factor);
  }
  BigInt remaining = lambda - 1;
  drain(stack, remaining, out);
}

BigInt AccessContext::report(VariableId c, const BigInt& lambda, const Sink& out) const {
  if (lambda <= 0) return 0;
  std::vector<Frame> stack;
  stack.push_back(fresh_frame(c));
  BigInt remaining = lambda;
  drain(stack, remaining, out);
  return remaining;
}

AccessContext::Frame AccessContext::fresh_frame(VariableId v) const {
  Frame f{v};
  if (const IterIndex* idx = index(v)) {
    f.block = 1;
    f.factor = 1;
    f.copies = 0;
    f.reps = boost::multiprecision::pow(BigInt(idx->k1()), idx->C(1));
  }
  return f;
}

void AccessContext::drain(std::vector<Frame>& stack, BigInt& lambda, const Sink& out) const {
  while (!stack.empty() && lambda > 0) {
    Frame& f = stack.back();
    const Rule& rule = grammar_.rule(f.v);
    if (const auto* t = std::get_if<Terminal>(&rule)) {
      out(static_cast<char>(t->symbol));
      --lambda;
      stack.pop_back();
    } else if (const auto* b = std::get_if<Binary>(&rule)) {
      if (f.stage == 2) {
        stack.pop_back();
        continue;
      }
      const VariableId next = f.stage == 0 ? b->left : b->right;
      ++f.stage;
      stack.push_back(fresh_frame(next));
    } else {
      const IterIndex& idx = *indexes_[f.v];
      if (f.copies < f.reps) {
        ++f.copies;
        stack.push_back(fresh_frame(idx.factor(f.factor)));  // invalidates f
        continue;
      }
      if (++f.factor > idx.t()) {
        f.factor = 1;
        f.block += 1;
        if (f.block > BigInt(idx.hi() - idx.lo() + 1)) {
          stack.pop_back();
          continue;
        }
      }
      const BigInt i = idx.descending() ? BigInt(BigInt(idx.hi()) - f.block + 1)
                                        : BigInt(BigInt(idx.lo()) + f.block - 1);
      f.copies = 0;
      f.reps = boost::multiprecision::pow(i, idx.C(f.factor));
    }
  }
}

}  // namespace islp
