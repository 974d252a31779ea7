#include "islp/poly.hpp"

#include <algorithm>
#include <mutex>

namespace islp {

namespace {

BigInt binomial(unsigned n, unsigned k) {
  BigInt r = 1;
  for (unsigned j = 1; j <= k; ++j) {
    r *= n - k + j;
    r /= j;
  }
  return r;
}

std::size_t ceil_log2(const BigInt& m) {
  if (m <= 1) return 0;
  return boost::multiprecision::msb(BigInt(m - 1)) + 1;
}

}  // namespace

std::vector<Rational> bernoulli_numbers(Exponent d) {
  std::vector<Rational> b(d + 1);
  b[0] = 1;
  for (Exponent m = 1; m <= d; ++m) {
    Rational acc = 0;
    for (Exponent j = 0; j < m; ++j) acc += Rational(binomial(m + 1, j)) * b[j];
    b[m] = -acc / Rational(m + 1);
  }
  return b;
}

FaulhaberTable::FaulhaberTable(Exponent d)
    : degree_(d), bernoulli_(bernoulli_numbers(d)), numer_(d + 1), denom_(d + 1) {
  for (Exponent c = 0; c <= d; ++c) {
    // p_c(k) = k^c + 1/(c+1) * sum_{j=0}^{c} C(c+1, j) B_j k^{c+1-j} - 0^c.
    // The bracketed sum is sum_{i=0}^{k-1} i^c, which counts 0^0 = 1 when
    // c = 0; the trailing term removes it.
    std::vector<Rational> coeff(c + 2);
    coeff[c] += 1;
    if (c == 0) coeff[0] -= 1;
    for (Exponent j = 0; j <= c; ++j)
      coeff[c + 1 - j] += Rational(binomial(c + 1, j)) * bernoulli_[j] / Rational(c + 1);
    BigInt den = 1;
    for (const auto& q : coeff) den = boost::multiprecision::lcm(den, denominator(q));
    numer_[c].resize(c + 2);
    for (Exponent e = 0; e < c + 2; ++e)
      numer_[c][e] = numerator(coeff[e]) * (den / denominator(coeff[e]));
    denom_[c] = std::move(den);
  }
}

BigInt FaulhaberTable::power_sum(Exponent c, const BigInt& k) const {
  if (c > degree_) throw std::out_of_range("exponent exceeds Faulhaber table degree");
  if (k <= 0) return 0;
  const auto& coeff = numer_[c];
  BigInt acc = 0;
  for (auto e = coeff.size(); e-- > 0;) acc = acc * k + coeff[e];
  BigInt q, r;
  boost::multiprecision::divide_qr(acc, denom_[c], q, r);
  if (r != 0)
    throw ArithmeticError("power sum p_" + std::to_string(c) + "(" + k.str() +
                          ") is not integral");
  return q;
}

BigInt FaulhaberTable::power_sum(Exponent c, const BigInt& lo, const BigInt& hi) const {
  if (hi < lo) return 0;
  return power_sum(c, hi) - power_sum(c, lo - 1);
}

std::shared_ptr<const FaulhaberTable> faulhaber_table(Exponent d) {
  static std::mutex mu;
  static std::shared_ptr<const FaulhaberTable> cached;
  std::lock_guard lock(mu);
  if (!cached || cached->degree() < d) {
    // Grow geometrically so repeated requests do not rebuild every time.
    Exponent target = std::max<Exponent>(d, cached ? cached->degree() * 2 : 8);
    cached = std::make_shared<const FaulhaberTable>(target);
  }
  return cached;
}

// ---------------------------------------------------------------------------
// IterIndex

IterIndex::IterIndex(const Grammar& g, VariableId a, std::shared_ptr<const FaulhaberTable> table)
    : var_(a), table_(std::move(table)) {
  const auto* it = std::get_if<Iter>(&g.rule(a));
  if (!it) throw GrammarError("IterIndex: variable is not an iteration rule");
  k1_ = it->k1;
  k2_ = it->k2;
  degree_ = g.max_degree();
  if (table_->degree() < degree_) throw std::out_of_range("Faulhaber table degree too small");

  const std::size_t t = it->factors.size();
  vars_.reserve(t);
  lengths_.reserve(t);
  exps_.reserve(t);
  sums_.reserve(t);
  std::vector<BigInt> running(degree_ + 1, 0);
  for (const auto& f : it->factors) {
    if (f.exp > degree_) throw std::out_of_range("factor exponent exceeds table degree");
    vars_.push_back(f.var);
    lengths_.push_back(g.length(f.var));
    exps_.push_back(f.exp);
    running[f.exp] += g.length(f.var);
    sums_.push_back(running[f.exp]);
  }

  const std::size_t width = degree_ + 1;
  const std::size_t chunks = (t + width - 1) / width;
  snapshots_.assign(chunks * width, 0);
  std::vector<std::uint32_t> last(width, 0);
  for (std::size_t j = 0; j < chunks; ++j) {
    std::copy(last.begin(), last.end(), snapshots_.begin() + j * width);
    for (std::size_t k = j * width + 1; k <= std::min(t, (j + 1) * width); ++k)
      last[exps_[k - 1]] = static_cast<std::uint32_t>(k);
  }

  std::vector<std::size_t> at_t;
  pred_all(t, at_t);
  totals_.assign(width, 0);
  base_ = 0;
  const BigInt before = BigInt(lo()) - 1;
  for (Exponent c = 0; c <= degree_; ++c) {
    if (at_t[c] == 0) continue;
    totals_[c] = sums_[at_t[c] - 1];
    base_ += totals_[c] * table_->power_sum(c, before);
  }
  total_ = f_plus(BigInt(hi()));
}

void IterIndex::pred_all(std::size_t r, std::vector<std::size_t>& out) const {
  const std::size_t width = degree_ + 1;
  out.assign(width, 0);
  if (r == 0) return;
  const std::size_t chunk = (r + width - 1) / width - 1;
  for (std::size_t c = 0; c < width; ++c) out[c] = snapshots_[chunk * width + c];
  for (std::size_t k = chunk * width + 1; k <= r; ++k) out[exps_[k - 1]] = k;
}

std::optional<std::size_t> IterIndex::pred(std::size_t r, Exponent c) const {
  if (r > t()) throw std::out_of_range("pred: position beyond factor count");
  if (c > degree_ || r == 0) return std::nullopt;
  const std::size_t width = degree_ + 1;
  const std::size_t chunk = (r + width - 1) / width - 1;
  std::size_t best = snapshots_[chunk * width + c];
  for (std::size_t k = chunk * width + 1; k <= r; ++k)
    if (exps_[k - 1] == c) best = k;
  if (best == 0) return std::nullopt;
  return best;
}

BigInt IterIndex::f_r(std::size_t r, const BigInt& i) const {
  if (r > t()) throw std::out_of_range("f_r: position beyond factor count");
  if (r == 0) return 0;
  std::vector<std::size_t> rc;
  pred_all(r, rc);
  BigInt acc = 0;
  for (auto c = rc.size(); c-- > 0;) {
    acc *= i;
    if (rc[c] != 0) acc += sums_[rc[c] - 1];
  }
  return acc;
}

BigInt IterIndex::f_plus(const BigInt& k) const {
  if (k < BigInt(lo()) - 1 || k > BigInt(hi()))
    throw std::out_of_range("f_plus: block index outside [k1-1..k2]");
  if (k == BigInt(lo()) - 1) return 0;
  BigInt acc = 0;
  for (Exponent c = 0; c <= degree_; ++c)
    if (totals_[c] != 0) acc += totals_[c] * table_->power_sum(c, k);
  return acc - base_;
}

// ---------------------------------------------------------------------------

BigInt out_length(const Iter& it, const FaulhaberTable& table) {
  BigInt m = 0;
  for (const auto& f : it.factors) m += table.power_sum(f.exp, BigInt(it.lo()), BigInt(it.hi()));
  return m;
}

std::size_t unfolded_height(const Grammar& g) {
  auto table = faulhaber_table(g.max_degree());
  std::vector<std::size_t> h(g.num_vars(), 0);
  for (VariableId v : g.topological_order()) {
    const Rule& r = g.rule(v);
    if (const auto* b = std::get_if<Binary>(&r)) {
      h[v] = 1 + std::max(h[b->left], h[b->right]);
    } else if (const auto* it = std::get_if<Iter>(&r)) {
      std::size_t child = 0;
      for (const auto& f : it->factors) child = std::max(child, h[f.var]);
      h[v] = std::max<std::size_t>(1, ceil_log2(out_length(*it, *table))) + child;
    }
  }
  return h[g.start()];
}

}  // namespace islp
