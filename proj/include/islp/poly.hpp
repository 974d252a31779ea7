#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "islp/grammar.hpp"

namespace islp {

using Rational = boost::multiprecision::cpp_rational;

/// Raised when exact arithmetic produces a value that must be integral but
/// is not. Always indicates a bug, never bad input.
class ArithmeticError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Bernoulli numbers B_0..B_d (convention B_1 = -1/2) and the power-sum
/// polynomials p_c(k) = sum_{i=1}^{k} i^c for c <= d.
class FaulhaberTable {
 public:
  explicit FaulhaberTable(Exponent d);

  Exponent degree() const { return degree_; }
  const std::vector<Rational>& bernoulli() const { return bernoulli_; }

  /// p_c(k); p_c(0) = 0. Throws std::out_of_range if c > degree().
  BigInt power_sum(Exponent c, const BigInt& k) const;
  /// sum_{i=lo}^{hi} i^c, zero for an empty range (hi < lo).
  BigInt power_sum(Exponent c, const BigInt& lo, const BigInt& hi) const;

 private:
  Exponent degree_;
  std::vector<Rational> bernoulli_;
  // p_c(k) = (sum_e numer_[c][e] * k^e) / denom_[c]
  std::vector<std::vector<BigInt>> numer_;
  std::vector<BigInt> denom_;
};

/// Bernoulli numbers by the recurrence sum_{j=0}^{m} C(m+1, j) B_j = 0.
std::vector<Rational> bernoulli_numbers(Exponent d);

/// Shared, process-wide table covering at least degree `d`.
std::shared_ptr<const FaulhaberTable> faulhaber_table(Exponent d);

/// Navigation structure for one iteration rule
///   A -> prod_{i=k1}^{k2} B_1^{i^c_1} ... B_t^{i^c_t}.
/// Positions r are 1-based factor indices; f_r(i) is the length of
/// B_1^{i^c_1} ... B_r^{i^c_r}; f_plus(k) is the length of blocks lo()..k.
/// Chunks have length d+1 where d is the grammar's maximum exponent.
class IterIndex {
 public:
  IterIndex(const Grammar& g, VariableId a, std::shared_ptr<const FaulhaberTable> table);

  VariableId var() const { return var_; }
  BlockIndex k1() const { return k1_; }
  BlockIndex k2() const { return k2_; }
  BlockIndex lo() const { return k1_ < k2_ ? k1_ : k2_; }
  BlockIndex hi() const { return k1_ < k2_ ? k2_ : k1_; }
  bool descending() const { return k1_ > k2_; }
  std::size_t t() const { return exps_.size(); }
  Exponent degree() const { return degree_; }

  /// S[r] for r in 1..t: sum of |exp(B_j)| over j <= r with c_j = c_r.
  const BigInt& S(std::size_t r) const { return sums_.at(r - 1); }
  Exponent C(std::size_t r) const { return exps_.at(r - 1); }
  VariableId factor(std::size_t r) const { return vars_.at(r - 1); }
  const BigInt& factor_length(std::size_t r) const { return lengths_.at(r - 1); }

  /// Latest j <= r with C[j] = c, or nullopt. r may be 0 (always nullopt).
  std::optional<std::size_t> pred(std::size_t r, Exponent c) const;

  /// f_r(i); f_0(i) = 0.
  BigInt f_r(std::size_t r, const BigInt& i) const;
  /// f^+(k) for lo()-1 <= k <= hi(); f^+(lo()-1) = 0.
  BigInt f_plus(const BigInt& k) const;
  /// |exp(A)| = f^+(hi()), cached at construction.
  const BigInt& total_length() const { return total_; }

  /// Number of stored predecessor snapshot entries.
  std::size_t snapshot_entries() const { return snapshots_.size(); }

 private:
  // Fills out[c] = pred(r, c) (0 meaning none) for every c in 0..degree_.
  void pred_all(std::size_t r, std::vector<std::size_t>& out) const;

  VariableId var_;
  BlockIndex k1_, k2_;
  Exponent degree_;
  std::vector<VariableId> vars_;
  std::vector<BigInt> lengths_;
  std::vector<BigInt> sums_;
  std::vector<Exponent> exps_;
  // snapshots_[j * (degree_+1) + c] = pred(j * (degree_+1), c), 0 = none.
  std::vector<std::uint32_t> snapshots_;
  std::shared_ptr<const FaulhaberTable> table_;
  // s_c = S[pred(t, c)] and the constant sum_c s_c * p_c(lo-1).
  std::vector<BigInt> totals_;
  BigInt base_;
  BigInt total_;
};

inline IterIndex build_iter_index(const Grammar& g, VariableId a) {
  return IterIndex(g, a, faulhaber_table(g.max_degree()));
}

/// Number of variables emitted by an iteration rule, sum_j sum_i i^{c_j}.
BigInt out_length(const Iter& it, const FaulhaberTable& table);

/// Height where each iteration rule is unfolded into a balanced binary tree
/// over its output sequence (the run-length view of the grammar).
std::size_t unfolded_height(const Grammar& g);

}  // namespace islp
