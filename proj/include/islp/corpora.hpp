#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "islp/grammar.hpp"

namespace islp {

/// S -> prod_{i=1}^{k} A^i B with A -> 'a', B -> 'b'. Size 8, n = k(k+3)/2.
Grammar gen_sk(BlockIndex k);

/// F_0 = a, F_1 = b, F_{i+2} = F_{i+1} F_i.
std::string gen_fibonacci(unsigned i);

/// Length-n prefix of the Thue-Morse word over {a, b}.
std::string thue_morse_prefix(std::size_t n);

/// Byte used for the j-th separator (1-based). Separators never collide with
/// 'a' or 'b'; at most kMaxSeparators are available.
inline constexpr std::size_t kMaxSeparators = 200;
unsigned char separator(std::size_t j);

/// T(k_1) |_1 T(k_2) |_2 ... T(k_p). The k_i must be distinct and positive,
/// with k_1 the largest; throws std::invalid_argument otherwise.
std::string gen_thue_morse_concat(const std::vector<std::uint64_t>& ks);

/// a^n as a left-deep chain V_1 = 'a', V_j = V_{j-1} A (height n-1).
Grammar gen_left_chain(std::size_t n, unsigned char c = 'a');

/// Deterministic bounded draws over std::mt19937_64; the distribution objects
/// of <random> are implementation-defined, so they are avoided.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64";
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [lo, hi].
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);
  /// True with probability num/den.
  bool chance(std::uint64_t num, std::uint64_t den) { return uniform(1, den) <= num; }

 private:
  std::mt19937_64 engine_;
};

struct RandomIslpParams {
  std::uint64_t seed = 1;
  std::size_t variables = 12;   // non-terminal rules to attempt
  std::size_t alphabet = 3;     // terminals 'a', 'b', ...
  std::size_t max_t = 4;
  BlockIndex max_k = 5;
  Exponent max_c = 2;
  std::uint64_t iter_num = 1;   // iter_fraction = iter_num / iter_den
  std::uint64_t iter_den = 3;
  std::size_t max_length = 10'000;
};

/// Random ISLP built in topological order (children always precede parents),
/// so it is acyclic by construction. Unreachable variables are pruned.
Grammar random_islp(const RandomIslpParams& p);

/// Random grammar of length exactly n whose rules mostly extend the previous
/// variable, giving height close to linear in the number of rules. Some
/// iteration rules are mixed in when `with_iter`.
Grammar gen_random_unbalanced(std::uint64_t seed, std::size_t n, bool with_iter = true);

}  // namespace islp
