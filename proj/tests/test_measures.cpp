#include <algorithm>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "islp/corpora.hpp"
#include "islp/measures.hpp"

using namespace islp;

namespace {

Rational delta_oracle(const std::string& t) {
  Rational best = 0;
  for (std::size_t k = 1; k <= t.size(); ++k) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i + k <= t.size(); ++i) seen.insert(t.substr(i, k));
    best = std::max(best, Rational(BigInt(seen.size()), BigInt(k)));
  }
  return best;
}

std::uint64_t z_oracle(const std::string& t) {
  std::uint64_t z = 0;
  for (std::size_t i = 0; i < t.size(); ++z) {
    std::size_t best = 0;
    for (std::size_t j = 0; j < i; ++j) {
      std::size_t l = 0;
      while (i + l < t.size() && t[j + l] == t[i + l]) ++l;
      best = std::max(best, l);
    }
    i += std::max<std::size_t>(1, best);
  }
  return z;
}

std::uint64_t bwt_oracle(std::string t, bool sentinel) {
  if (sentinel) t.push_back('\0');
  std::vector<std::string> rot;
  for (std::size_t i = 0; i < t.size(); ++i) rot.push_back(t.substr(i) + t.substr(0, i));
  std::sort(rot.begin(), rot.end(), [](const std::string& a, const std::string& b) {
    // unsigned comparison; '\0' is the smallest symbol
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(),
        [](char x, char y) { return static_cast<unsigned char>(x) < static_cast<unsigned char>(y); });
  });
  std::uint64_t runs = 0;
  for (std::size_t i = 0; i < rot.size(); ++i) runs += i == 0 || rot[i].back() != rot[i - 1].back();
  return runs;
}

std::vector<std::string> sample_texts() {
  std::vector<std::string> ts{"a", "ab", "aaaa", "abaab", "mississippi", islp::testing::kSk5Text,
                              gen_fibonacci(9), thue_morse_prefix(100)};
  Rng rng(3);
  for (int i = 0; i < 60; ++i) {
    std::string s(rng.uniform(1, 120), 'a');
    const auto sigma = rng.uniform(1, 4);
    for (auto& c : s) c = static_cast<char>('a' + rng.uniform(0, sigma - 1));
    ts.push_back(s);
  }
  ts.push_back(std::string("\xff\x80z", 3));
  return ts;
}

}  // namespace

TEST_CASE("small examples") {
  CHECK(delta("aaaa") == 1);
  CHECK(delta("ab") == 2);
  CHECK(lz76_z("aaaa") == 2);
  CHECK(lz76_z("a") == 1);
  CHECK(lz76_z("ab") == 2);
  CHECK(bwt_runs("aaaa", false) == 1);
  CHECK(bwt_runs("abaab", false) == bwt_oracle("abaab", false));
  const auto tk = distinct_substring_counts(islp::testing::kSk5Text);
  CHECK(tk[1] == 2);
  CHECK(delta(islp::testing::kSk5Text) == delta_oracle(islp::testing::kSk5Text));
  CHECK_THROWS(delta(""));
}

TEST_CASE("suffix array is sorted") {
  for (const std::string& t : sample_texts()) {
    const auto sa = suffix_array(t);
    REQUIRE(sa.size() == t.size());
    for (std::size_t r = 1; r < sa.size(); ++r) {
      const std::string_view a = std::string_view(t).substr(sa[r - 1]);
      const std::string_view b = std::string_view(t).substr(sa[r]);
      CHECK(std::lexicographical_compare(
          a.begin(), a.end(), b.begin(), b.end(),
          [](char x, char y) { return static_cast<unsigned char>(x) < static_cast<unsigned char>(y); }));
    }
  }
}

TEST_CASE("measures agree with brute force") {
  for (const std::string& t : sample_texts()) {
    CAPTURE(t);
    CHECK(delta(t) == delta_oracle(t));
    CHECK(lz76_z(t) == z_oracle(t));
    CHECK(bwt_runs(t, false) == bwt_oracle(t, false));
    CHECK(bwt_runs(t, true) == bwt_oracle(t, true));
  }
}

TEST_CASE("report invariants") {
  for (const std::string& t : sample_texts()) {
    const MeasureReport m = measure(t);
    CHECK(m.delta <= Rational(BigInt(m.z)));
    CHECK(m.z <= m.n);
    CHECK(m.delta >= 1);
    CHECK(m.bwt_runs >= 1);
    CHECK(m.bwt_runs_sentinel >= 1);
  }
}

TEST_CASE("even Fibonacci words have a constant BWT run count") {
  const auto r8 = bwt_runs(gen_fibonacci(8), false);
  const auto s8 = bwt_runs(gen_fibonacci(8), true);
  for (unsigned i : {10u, 12u, 14u, 20u}) {
    CHECK(bwt_runs(gen_fibonacci(i), false) == r8);
    CHECK(bwt_runs(gen_fibonacci(i), true) == s8);
  }
  CHECK(r8 == bwt_oracle(gen_fibonacci(8), false));
  CHECK(s8 == bwt_oracle(gen_fibonacci(8), true));
  MESSAGE("r = " << r8 << ", r$ = " << s8);
}

TEST_CASE("large inputs stay fast") {
  const std::string t = gen_fibonacci(28);  // ~500k symbols
  const auto z = lz76_z(t);
  CHECK(z >= 1);
  CHECK(delta(t) <= Rational(BigInt(z)));
}
