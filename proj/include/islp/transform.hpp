#pragma once

#include <map>
#include <string>
#include <vector>

#include "islp/grammar.hpp"

namespace islp {

/// Rewrites exponents so that every c_j <= log2 n without changing the text or
/// the size. Rules over the single block i = 1 get all exponents set to 0;
/// other rules already satisfy i^{c_j} <= n. A rule whose exponent still
/// exceeds floor(log2 n) is left untouched and appended to `flagged`.
Grammar clamp_degree(const Grammar& g, std::vector<VariableId>* flagged = nullptr);

/// Grammar of the same size generating the reversed text.
Grammar reverse(const Grammar& g);

/// Image of the text under the morphism `phi`. Characters absent from `phi`
/// map to themselves. Throws GrammarError if a used character maps to "".
Grammar apply_morphism(const Grammar& g, const std::map<unsigned char, std::string>& phi);

/// Parses "a=ab,b=b" into a morphism table.
std::map<unsigned char, std::string> parse_morphism(std::string_view text);

struct EditOp {
  enum class Kind { kSubstitute, kInsertBefore, kInsertAfter, kDelete };
  Kind kind;
  BigInt position;          // 1-based
  unsigned char symbol = 0;  // unused for kDelete
};

/// Grammar for the text after one single-character edit. New variables are
/// created along the root-to-position path only; empty pieces are dropped.
/// Throws RangeError for an invalid position and GrammarError if the edit
/// would leave the text empty.
Grammar edit(const Grammar& g, const EditOp& op);

}  // namespace islp
