#include "islp/measures.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace islp {

namespace {

std::vector<std::uint32_t> widen(std::string_view t, bool sentinel) {
  std::vector<std::uint32_t> s;
  s.reserve(t.size() + 1);
  for (unsigned char c : t) s.push_back(static_cast<std::uint32_t>(c) + 1);
  if (sentinel) s.push_back(0);
  return s;
}

}  // namespace

std::vector<std::uint32_t> rotation_order(const std::vector<std::uint32_t>& s) {
  const std::size_t n = s.size();
  std::vector<std::uint32_t> p(n), c(n), pn(n), cn(n);
  if (n == 0) return p;
  std::iota(p.begin(), p.end(), 0u);
  std::stable_sort(p.begin(), p.end(), [&](std::uint32_t a, std::uint32_t b) { return s[a] < s[b]; });
  std::uint32_t classes = 1;
  c[p[0]] = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (s[p[i]] != s[p[i - 1]]) ++classes;
    c[p[i]] = classes - 1;
  }
  std::vector<std::uint32_t> cnt;
  for (std::size_t h = 1; h < n && classes < n; h <<= 1) {
    // p sorted by the first h symbols; sort by the pair (c[i], c[i+h]) with a
    // counting sort on the first component.
    for (std::size_t i = 0; i < n; ++i) pn[i] = static_cast<std::uint32_t>((p[i] + n - h) % n);
    cnt.assign(classes, 0);
    for (std::size_t i = 0; i < n; ++i) ++cnt[c[pn[i]]];
    for (std::size_t i = 1; i < classes; ++i) cnt[i] += cnt[i - 1];
    for (std::size_t i = n; i-- > 0;) p[--cnt[c[pn[i]]]] = pn[i];
    cn[p[0]] = 0;
    classes = 1;
    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t a = p[i], b = p[i - 1];
      if (c[a] != c[b] || c[(a + h) % n] != c[(b + h) % n]) ++classes;
      cn[a] = classes - 1;
    }
    c.swap(cn);
  }
  return p;
}

std::vector<std::uint32_t> suffix_array(std::string_view t) {
  if (t.size() >= 0xffffffffu) throw std::length_error("text too long");
  std::vector<std::uint32_t> order = rotation_order(widen(t, true));
  order.erase(order.begin());  // the sentinel rotation
  return order;
}

std::vector<std::uint32_t> lcp_array(std::string_view t, const std::vector<std::uint32_t>& sa) {
  const std::size_t n = t.size();
  std::vector<std::uint32_t> rank(n), lcp(n, 0);
  for (std::size_t r = 0; r < n; ++r) rank[sa[r]] = static_cast<std::uint32_t>(r);
  std::size_t h = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rank[i] == 0) {
      h = 0;
      continue;
    }
    const std::size_t j = sa[rank[i] - 1];
    while (i + h < n && j + h < n && t[i + h] == t[j + h]) ++h;
    lcp[rank[i]] = static_cast<std::uint32_t>(h);
    if (h > 0) --h;
  }
  return lcp;
}

std::vector<std::uint64_t> distinct_substring_counts(std::string_view t) {
  // T_k = #suffixes of length >= k minus #adjacent suffix pairs sharing k symbols.
  const std::size_t n = t.size();
  const auto sa = suffix_array(t);
  const auto lcp = lcp_array(t, sa);
  std::vector<std::int64_t> diff(n + 2, 0);
  for (std::size_t r = 0; r < n; ++r) {
    ++diff[1];
    --diff[n - sa[r] + 1];
    if (lcp[r] > 0) {
      --diff[1];
      ++diff[lcp[r] + 1];
    }
  }
  std::vector<std::uint64_t> tk(n + 1, 0);
  std::int64_t run = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    run += diff[k];
    tk[k] = static_cast<std::uint64_t>(run);
  }
  return tk;
}

Rational delta(std::string_view t) {
  if (t.empty()) throw std::invalid_argument("delta of the empty text");
  const auto tk = distinct_substring_counts(t);
  std::uint64_t bn = tk[1], bd = 1;
  for (std::uint64_t k = 2; k < tk.size(); ++k)
    if (tk[k] * bd > bn * k) bn = tk[k], bd = k;
  return Rational(BigInt(bn), BigInt(bd));
}

std::uint64_t lz76_z(std::string_view t) {
  const std::size_t n = t.size();
  if (n == 0) return 0;
  std::vector<std::uint32_t> sa = suffix_array(t);
  std::vector<std::uint32_t> lcp = lcp_array(t, sa);
  // Longest previous factor per position: a stack pass over the suffix array
  // pairing each suffix with its nearest earlier-starting neighbours.
  std::vector<std::uint32_t> lpf(n, 0);
  std::vector<std::int64_t> pos(sa.begin(), sa.end());
  pos.push_back(-1);
  lcp.push_back(0);
  std::vector<std::size_t> stack{0};
  for (std::size_t i = 1; i <= n; ++i) {
    while (!stack.empty()) {
      const std::size_t top = stack.back();
      if (pos[i] < pos[top]) {
        lpf[pos[top]] = std::max(lcp[top], lcp[i]);
        lcp[i] = std::min(lcp[top], lcp[i]);
      } else if (lcp[i] <= lcp[top]) {
        lpf[pos[top]] = lcp[top];
      } else {
        break;
      }
      stack.pop_back();
    }
    if (i < n) stack.push_back(i);
  }
  std::uint64_t z = 0;
  for (std::size_t i = 0; i < n; i += std::max<std::size_t>(1, lpf[i])) ++z;
  return z;
}

std::uint64_t bwt_runs(std::string_view t, bool sentinel) {
  if (t.empty()) return sentinel ? 1 : 0;
  const auto s = widen(t, sentinel);
  const auto order = rotation_order(s);
  const std::size_t n = s.size();
  std::uint64_t runs = 0;
  std::uint32_t prev = 0xffffffffu;
  for (std::uint32_t r : order) {
    const std::uint32_t c = s[(r + n - 1) % n];
    runs += c != prev;
    prev = c;
  }
  return runs;
}

MeasureReport measure(std::string_view t) {
  MeasureReport m;
  m.n = t.size();
  m.delta = delta(t);
  m.z = lz76_z(t);
  m.bwt_runs = bwt_runs(t, false);
  m.bwt_runs_sentinel = bwt_runs(t, true);
  return m;
}

}  // namespace islp
