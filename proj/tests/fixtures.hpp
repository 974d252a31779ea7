#pragma once

#include <string>

#include "islp/grammar.hpp"

namespace islp::testing {

// s_5 = prod_{i=1}^{5} a^i b
inline const char* kSk5 = R"(A = 'a'
B = 'b'
S = prod i in 1..5 { A^(i^1) B^(i^0) }
start S
)";

inline const char* kSk5Text = "abaabaaabaaaabaaaaab";

// Iteration rule with |B|=2, |C|=3, |D|=4, |E|=7.
inline const char* kMixedIter = R"(# B^i C^{i^2} D^i E E E^i B^{i^2} C^{i^3}
a = 'a'
b = 'b'
B = a b
C = B a
D = B B
E = D C
A = prod i in 1..5 { B^(i^1) C^(i^2) D^(i^1) E^(i^0) E^(i^0) E^(i^1) B^(i^2) C^(i^3) }
start A
)";

inline Grammar sk5() { return parse_grammar(kSk5); }
inline Grammar mixed_iter() { return parse_grammar(kMixedIter); }

}  // namespace islp::testing
