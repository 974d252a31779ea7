#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace islp {

using BigInt = boost::multiprecision::cpp_int;
using VariableId = std::uint32_t;
using Exponent = std::uint32_t;
using BlockIndex = std::uint64_t;

inline constexpr std::size_t kDefaultOracleLimit = 10'000'000;

struct Terminal {
  unsigned char symbol;
  bool operator==(const Terminal&) const = default;
};

struct Binary {
  VariableId left;
  VariableId right;
  bool operator==(const Binary&) const = default;
};

struct Factor {
  VariableId var;
  Exponent exp;
  bool operator==(const Factor&) const = default;
};

// prod_{i=k1}^{k2} B_1^{i^c_1} ... B_t^{i^c_t}; when k1 > k2 the blocks are
// emitted from i=k1 downwards. Factor order inside a block is the same either
// way.
struct Iter {
  BlockIndex k1;
  BlockIndex k2;
  std::vector<Factor> factors;

  bool descending() const { return k1 > k2; }
  BlockIndex lo() const { return k1 < k2 ? k1 : k2; }
  BlockIndex hi() const { return k1 < k2 ? k2 : k1; }
  BlockIndex block_count() const { return hi() - lo() + 1; }
  bool operator==(const Iter&) const = default;
};

using Rule = std::variant<Terminal, Binary, Iter>;

/// Raised for malformed or invalid grammars (syntax, cycles, undefined names).
class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a position or length is outside the valid range, or an
/// explicit expansion would exceed the configured oracle limit.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class Grammar;

/// Mutable staging area for grammars. Transforms and generators add rules
/// here, then `build` validates and freezes the result.
class GrammarBuilder {
 public:
  VariableId add(std::string name, Rule rule);
  VariableId add_terminal(unsigned char c) { return add({}, Terminal{c}); }
  VariableId add_binary(VariableId l, VariableId r) { return add({}, Binary{l, r}); }
  VariableId add_iter(BlockIndex k1, BlockIndex k2, std::vector<Factor> factors) {
    return add({}, Iter{k1, k2, std::move(factors)});
  }
  /// Copies every rule of `g` into this builder; returns the id offset.
  VariableId import(const Grammar& g, bool keep_names = false);
  void set_start(VariableId s) { start_ = s; }
  std::size_t size() const { return rules_.size(); }
  const Rule& rule(VariableId v) const { return rules_.at(v); }
  Rule& rule(VariableId v) { return rules_.at(v); }

  /// Validates and freezes. With `prune`, unreachable variables are dropped
  /// and the remaining ones renumbered in their original relative order;
  /// without it, they are a validation error. Empty names are replaced with
  /// fresh unique names.
  Grammar build(bool prune = true) &&;

 private:
  std::vector<std::string> names_;
  std::vector<Rule> rules_;
  std::optional<VariableId> start_;
};

/// A validated, immutable iterated straight-line program.
class Grammar {
 public:
  std::size_t num_vars() const { return rules_.size(); }
  const Rule& rule(VariableId v) const { return rules_.at(v); }
  const std::string& name(VariableId v) const { return names_.at(v); }
  std::optional<VariableId> find(std::string_view name) const;
  VariableId start() const { return start_; }

  /// |exp(v)|.
  const BigInt& length(VariableId v) const { return lengths_.at(v); }
  const BigInt& n() const { return lengths_.at(start_); }

  /// Sum of rule sizes: terminal 1, binary 2, iteration 2 + 2t.
  std::size_t size() const;
  /// Derivation-tree height, counting an iteration node as a single level.
  std::size_t height() const;
  /// Height of every variable, same convention as `height`.
  const std::vector<std::size_t>& heights() const { return heights_; }
  /// Largest exponent c_j over all iteration rules (0 if there are none).
  Exponent max_degree() const;
  /// Variables in an order where every rule's children precede it.
  const std::vector<VariableId>& topological_order() const { return topo_; }

  bool operator==(const Grammar& o) const {
    return names_ == o.names_ && rules_ == o.rules_ && start_ == o.start_;
  }

 private:
  friend class GrammarBuilder;
  Grammar() = default;

  std::vector<std::string> names_;
  std::vector<Rule> rules_;
  VariableId start_ = 0;
  std::vector<BigInt> lengths_;
  std::vector<std::size_t> heights_;
  std::vector<VariableId> topo_;
  std::unordered_map<std::string, VariableId> by_name_;
};

std::size_t rule_size(const Rule& r);

/// Sum_{i=lo}^{hi} i^c by direct summation. Independent of the Faulhaber
/// machinery so that it can serve as its oracle.
BigInt power_sum_direct(BlockIndex lo, BlockIndex hi, Exponent c);

/// Parses the line-oriented grammar format; throws GrammarError with
/// "line L, column C" context.
Grammar parse_grammar(std::string_view text);

/// Inverse of parse_grammar: parse(emit(g)) == g.
std::string emit_grammar(const Grammar& g);

/// |exp(a)|.
inline const BigInt& exp_len(const Grammar& g, VariableId a) { return g.length(a); }

/// Full expansion of `a`; throws RangeError when longer than `limit`.
std::string expand(const Grammar& g, VariableId a,
                   std::size_t limit = kDefaultOracleLimit);
inline std::string expand(const Grammar& g) { return expand(g, g.start()); }

/// OUT(x) of an iteration rule: B_1 repeated i^{c_1} times, ..., B_t repeated
/// i^{c_t} times, for each i in iteration order.
std::vector<VariableId> unfold_iter(const Grammar& g, VariableId a,
                                    std::size_t limit = kDefaultOracleLimit);

/// Grammar with every iteration rule replaced by a plain sequence of its
/// unfolded output (binarized as a left-deep chain). Expansion oracle only.
Grammar unfold_all(const Grammar& g, std::size_t limit = kDefaultOracleLimit);

/// Converts to std::size_t, throwing RangeError if it does not fit.
std::size_t to_size(const BigInt& v, const char* what = "value");

}  // namespace islp
