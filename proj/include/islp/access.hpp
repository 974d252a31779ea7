#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "islp/grammar.hpp"
#include "islp/poly.hpp"

namespace islp {

/// One evaluation of f^+ or f_r performed while searching.
struct Probe {
  enum class Fn { kFPlus, kFr };
  Fn fn;
  BigInt arg;         // block index i (or k for f^+)
  std::size_t r = 0;  // factor index for f_r
  BigInt value;
};

/// One level of a descent through an iteration rule.
struct TraceStep {
  VariableId var;
  BigInt position;   // position inside exp(var)
  BigInt block;      // i
  std::size_t factor = 0;  // r
  BigInt offset;     // position inside B_r^{i^{c_r}}
  BigInt child_position;   // position inside exp(B_r)
};

/// Optional instrumentation for a single query.
struct QueryStats {
  std::size_t evaluations = 0;  // f^+ and f_r evaluations
  std::size_t levels = 0;       // rules descended through
  std::vector<Probe>* probes = nullptr;
  std::vector<TraceStep>* trace = nullptr;
};

struct BlockHit {
  BigInt block;       // i
  BigInt remainder;   // l - f^+(i-1), in text order
  BigInt block_length;  // f_t(i)
};

struct FactorHit {
  std::size_t factor;  // r
  BigInt offset;       // rem - f_{r-1}(i)
};

/// Finds the block i holding local position l (1 <= l <= |exp(A)|) with the
/// two-sided early-exit binary search. For descending rules blocks are
/// searched in text order.
BlockHit block_search(const IterIndex& idx, const BigInt& l, QueryStats* stats = nullptr);

/// Finds the factor r with f_{r-1}(i) < rem <= f_r(i). `block_length` is
/// f_t(i) when known (it is after block_search); pass a negative value to
/// have it computed.
FactorHit factor_search(const IterIndex& idx, const BigInt& i, const BigInt& rem,
                        const BigInt& block_length = BigInt(-1),
                        QueryStats* stats = nullptr);

/// Append-only character consumer.
using Sink = std::function<void(char)>;

/// Grammar plus navigation indexes for every iteration rule. The grammar is
/// degree-clamped first; positions are unaffected. Immutable and shareable.
class AccessContext {
 public:
  explicit AccessContext(const Grammar& g);

  const Grammar& grammar() const { return grammar_; }
  const FaulhaberTable& faulhaber() const { return *table_; }
  /// Index for an iteration rule, nullptr otherwise.
  const IterIndex* index(VariableId v) const;
  const BigInt& n() const { return grammar_.n(); }

  /// T[l], 1-based.
  char access(const BigInt& l, QueryStats* stats = nullptr) const;

  /// T[l..l+lambda-1].
  std::string extract(const BigInt& l, const BigInt& lambda) const;
  void extract(const BigInt& l, const BigInt& lambda, const Sink& out) const;

  /// Writes min(lambda, |exp(c)|) leading characters of exp(c); returns the
  /// remaining budget lambda - written.
  BigInt report(VariableId c, const BigInt& lambda, const Sink& out) const;

 private:
  struct Frame;
  // Frame positioned before the first character of exp(v).
  Frame fresh_frame(VariableId v) const;
  // Runs the frame stack until it empties or the budget hits zero.
  void drain(std::vector<Frame>& stack, BigInt& lambda, const Sink& out) const;

  Grammar grammar_;
  std::shared_ptr<const FaulhaberTable> table_;
  std::vector<std::unique_ptr<IterIndex>> indexes_;
};

}  // namespace islp
