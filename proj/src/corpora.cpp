#include "islp/corpora.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_set>

namespace islp {

Grammar gen_sk(BlockIndex k) {
  if (k == 0) throw std::invalid_argument("gen_sk: k must be >= 1");
  GrammarBuilder b;
  const VariableId a = b.add("A", Terminal{'a'});
  const VariableId bb = b.add("B", Terminal{'b'});
  b.set_start(b.add("S", Iter{1, k, {Factor{a, 1}, Factor{bb, 0}}}));
  return std::move(b).build(false);
}

std::string gen_fibonacci(unsigned i) {
  std::string prev = "a", cur = "b";
  if (i == 0) return prev;
  for (unsigned j = 1; j < i; ++j) {
    std::string next = cur + prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::string thue_morse_prefix(std::size_t n) {
  std::string s(n, 'a');
  for (std::size_t i = 0; i < n; ++i)
    if (std::popcount(static_cast<std::uint64_t>(i)) & 1) s[i] = 'b';
  return s;
}

unsigned char separator(std::size_t j) {
  // '|' upwards through 0xFF, then '0' upwards, skipping 'a' and 'b'.
  static const std::vector<unsigned char> table = [] {
    std::vector<unsigned char> t;
    for (unsigned c = '|'; c <= 0xFF; ++c) t.push_back(static_cast<unsigned char>(c));
    for (unsigned c = '0'; c < '|'; ++c)
      if (c != 'a' && c != 'b') t.push_back(static_cast<unsigned char>(c));
    return t;
  }();
  if (j == 0 || j > kMaxSeparators) throw std::invalid_argument("separator index out of range");
  return table[j - 1];
}

std::string gen_thue_morse_concat(const std::vector<std::uint64_t>& ks) {
  if (ks.empty()) throw std::invalid_argument("need at least one length");
  if (ks.size() - 1 > kMaxSeparators) throw std::invalid_argument("too many separators");
  std::unordered_set<std::uint64_t> seen;
  for (auto k : ks) {
    if (k == 0) throw std::invalid_argument("lengths must be positive");
    if (!seen.insert(k).second) throw std::invalid_argument("lengths must be distinct");
  }
  if (*std::max_element(ks.begin(), ks.end()) != ks.front())
    throw std::invalid_argument("k_1 must be the largest length");
  std::string out;
  for (std::size_t j = 0; j < ks.size(); ++j) {
    if (j > 0) out.push_back(static_cast<char>(separator(j)));
    out += thue_morse_prefix(ks[j]);
  }
  return out;
}

Grammar gen_left_chain(std::size_t n, unsigned char c) {
  if (n == 0) throw std::invalid_argument("gen_left_chain: n must be >= 1");
  GrammarBuilder b;
  const VariableId a = b.add_terminal(c);
  VariableId acc = a;
  for (std::size_t j = 1; j < n; ++j) acc = b.add_binary(acc, a);
  b.set_start(acc);
  return std::move(b).build();
}

std::uint64_t Rng::uniform(std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return next();  // full 64-bit range
  // Rejection sampling for an unbiased draw.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do x = next();
  while (x >= limit);
  return lo + x % span;
}

Grammar random_islp(const RandomIslpParams& p) {
  if (p.alphabet == 0 || p.alphabet > 26) throw std::invalid_argument("alphabet must be 1..26");
  Rng rng(p.seed);
  GrammarBuilder b;
  std::vector<VariableId> vars;
  std::vector<BigInt> lens;
  std::vector<bool> used;
  for (std::size_t c = 0; c < p.alphabet; ++c) {
    vars.push_back(b.add_terminal(static_cast<unsigned char>('a' + c)));
    lens.push_back(1);
    used.push_back(false);
  }

  // Prefer variables nobody references yet, so most of them stay reachable.
  auto pick = [&]() -> std::size_t {
    std::vector<std::size_t> fresh;
    for (std::size_t j = 0; j < vars.size(); ++j)
      if (!used[j]) fresh.push_back(j);
    if (!fresh.empty() && rng.chance(1, 2)) return fresh[rng.uniform(0, fresh.size() - 1)];
    return rng.uniform(0, vars.size() - 1);
  };

  const BigInt limit = p.max_length;
  for (std::size_t step = 0; step < p.variables; ++step) {
    bool added = false;
    for (int attempt = 0; attempt < 16 && !added; ++attempt) {
      if (rng.chance(p.iter_num, p.iter_den)) {
        Iter it;
        it.k1 = rng.uniform(1, p.max_k);
        it.k2 = rng.uniform(1, p.max_k);
        const std::size_t t = rng.uniform(1, p.max_t);
        std::vector<std::size_t> picked;
        for (std::size_t j = 0; j < t; ++j) {
          const std::size_t c = pick();
          picked.push_back(c);
          it.factors.push_back({vars[c], static_cast<Exponent>(rng.uniform(0, p.max_c))});
        }
        BigInt len = 0;
        for (std::size_t j = 0; j < t; ++j)
          len += lens[picked[j]] * power_sum_direct(it.lo(), it.hi(), it.factors[j].exp);
        if (len > limit) continue;
        for (auto c : picked) used[c] = true;
        vars.push_back(b.add({}, std::move(it)));
        lens.push_back(std::move(len));
      } else {
        const std::size_t l = pick(), r = pick();
        BigInt len = lens[l] + lens[r];
        if (len > limit) continue;
        used[l] = used[r] = true;
        vars.push_back(b.add_binary(vars[l], vars[r]));
        lens.push_back(std::move(len));
      }
      used.push_back(false);
      added = true;
    }
  }

  // Join whatever is still unreferenced under the last rule, within budget.
  std::size_t root = vars.size() - 1;
  for (std::size_t j = vars.size() - 1; j-- > p.alphabet;) {
    if (used[j] || lens[root] + lens[j] > limit) continue;
    vars.push_back(b.add_binary(vars[root], vars[j]));
    lens.push_back(lens[root] + lens[j]);
    used.push_back(false);
    root = vars.size() - 1;
  }
  b.set_start(vars[root]);
  return std::move(b).build();
}

Grammar gen_random_unbalanced(std::uint64_t seed, std::size_t n, bool with_iter) {
  if (n < 2) throw std::invalid_argument("gen_random_unbalanced: n must be >= 2");
  Rng rng(seed);
  GrammarBuilder b;
  std::vector<VariableId> vars{b.add_terminal('a'), b.add_terminal('b')};
  std::vector<std::size_t> lens{1, 1};
  VariableId cur = vars[rng.uniform(0, 1)];
  std::size_t len = 1;
  while (len < n) {
    const std::size_t room = n - len;
    if (with_iter && len <= room && rng.chance(1, 8)) {
      // cur -> prod_{i=1}^{2} cur^{i^0} x^{i^1}: 2|cur| + 3|x|
      std::vector<std::size_t> fits;
      for (std::size_t j = 0; j < vars.size(); ++j)
        if (len + 3 * lens[j] <= room) fits.push_back(j);
      if (!fits.empty()) {
        const std::size_t x = fits[rng.uniform(0, fits.size() - 1)];
        cur = b.add_iter(1, 2, {Factor{cur, 0}, Factor{vars[x], 1}});
        len = 2 * len + 3 * lens[x];
        vars.push_back(cur);
        lens.push_back(len);
        continue;
      }
    }
    // Extend by a random earlier variable that fits, biased towards short ones.
    std::vector<std::size_t> fits;
    for (std::size_t j = 0; j < vars.size(); ++j)
      if (lens[j] <= room) fits.push_back(j);
    std::size_t x = fits[rng.uniform(0, fits.size() - 1)];
    if (rng.chance(1, 2)) x = fits[rng.uniform(0, std::min<std::size_t>(fits.size() - 1, 1))];
    cur = rng.chance(3, 4) ? b.add_binary(cur, vars[x]) : b.add_binary(vars[x], cur);
    len += lens[x];
    vars.push_back(cur);
    lens.push_back(len);
  }
  b.set_start(cur);
  return std::move(b).build();
}

}  // namespace islp
