#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "islp/grammar.hpp"

using namespace islp;
using islp::testing::kSk5Text;

TEST_CASE("parse the s_5 grammar") {
  const Grammar g = islp::testing::sk5();
  CHECK(g.num_vars() == 3);
  CHECK(g.size() == 8);
  CHECK(g.n() == 20);
  CHECK(g.height() == 1);
  CHECK(expand(g) == kSk5Text);
}

TEST_CASE("single terminal grammar") {
  const Grammar g = parse_grammar("A='a'\nstart A");
  CHECK(g.n() == 1);
  CHECK(g.size() == 1);
  CHECK(g.height() == 0);
  CHECK(expand(g) == "a");
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_grammar("A='a'\nS = S A\nstart S\n"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("A='a'\nS = A Z\nstart S\n"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("A='a'\nS = prod i in 0..3 { A^(i^0) }\nstart S\n"),
                  GrammarError);
  CHECK_THROWS_AS(parse_grammar("A='a'\nS = prod i in 1..3 { }\nstart S\n"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("A='a'\nS = prod i in 1..3 { A }\nstart S\n"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("A='a'\n"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("A='a'\nB='b'\nstart A\n"), GrammarError);  // B unreachable
  CHECK_THROWS_AS(parse_grammar("A='a'\nA='b'\nstart A\n"), GrammarError);

  try {
    parse_grammar("A = 'a'\nS = A ?\nstart S\n");
    FAIL("expected a syntax error");
  } catch (const GrammarError& e) {
    CHECK(std::string(e.what()).find("line 2, column 7") != std::string::npos);
  }
}

TEST_CASE("escapes and comments round-trip") {
  const char* text = "# comment\nQ = '\\''\nN = '\\n'\nK = '\\\\'\nX = Q N\nS = X K\nstart S\n";
  const Grammar g = parse_grammar(text);
  CHECK(expand(g) == "'\n\\");
  CHECK(parse_grammar(emit_grammar(g)) == g);
}

TEST_CASE("emit/parse round-trip on s_5 and a mixed-degree iteration rule") {
  for (const Grammar& g : {islp::testing::sk5(), islp::testing::mixed_iter()}) {
    const std::string text = emit_grammar(g);
    CHECK(parse_grammar(text) == g);
    CHECK(emit_grammar(parse_grammar(text)) == text);
  }
}

TEST_CASE("lengths of a mixed-degree iteration rule") {
  const Grammar g = islp::testing::mixed_iter();
  const VariableId a = *g.find("A");
  // f+(5) = (9*5^4 + 38*5^3 + 117*5^2 + 256*5) / 12
  CHECK(exp_len(g, a) == 1215);
  CHECK(expand(g).size() == 1215);
  CHECK(rule_size(g.rule(a)) == 18);
  CHECK(exp_len(g, *g.find("E")) == 7);
}

TEST_CASE("trivial iteration ranges") {
  const Grammar g = parse_grammar(
      "x = 'x'\ny = 'y'\nB = x y\nS = prod i in 1..1 { B^(i^7) x^(i^3) }\nstart S\n");
  CHECK(g.n() == 3);
  CHECK(expand(g) == "xyx");
}

TEST_CASE("descending products") {
  const Grammar g = parse_grammar("X = 'x'\nS = prod i in 3..1 { X^(i^0) }\nstart S\n");
  CHECK(expand(g) == "xxx");
  const Grammar h = parse_grammar(
      "a = 'a'\nb = 'b'\nS = prod i in 3..1 { a^(i^1) b^(i^0) }\nstart S\n");
  CHECK(expand(h) == "aaabaabab");
  const auto& it = std::get<Iter>(h.rule(h.start()));
  CHECK(it.k1 == 3);  // stored as written
  CHECK(it.descending());
}

TEST_CASE("height") {
  const Grammar g = parse_grammar("C='c'\nB='b'\nA = C C\nS = A B\nstart S\n");
  CHECK(g.height() == 2);
}

TEST_CASE("unfold_iter") {
  {
    const Grammar g = parse_grammar("B='b'\nS = prod i in 1..3 { B^(i^0) }\nstart S\n");
    const VariableId b = *g.find("B");
    CHECK(unfold_iter(g, g.start()) == std::vector<VariableId>{b, b, b});
  }
  {
    const Grammar g = parse_grammar(
        "A='a'\nB='b'\nS = prod i in 1..2 { A^(i^1) B^(i^0) }\nstart S\n");
    const VariableId a = *g.find("A"), b = *g.find("B");
    CHECK(unfold_iter(g, g.start()) == std::vector<VariableId>{a, b, a, a, b});
  }
  {
    const Grammar g = parse_grammar(
        "A='a'\nB='b'\nS = prod i in 1..1 { A^(i^5) B^(i^2) }\nstart S\n");
    const VariableId a = *g.find("A"), b = *g.find("B");
    CHECK(unfold_iter(g, g.start()) == std::vector<VariableId>{a, b});
  }
  CHECK_THROWS_AS(unfold_iter(islp::testing::sk5(), 0), GrammarError);
}

TEST_CASE("unfold_all matches expand") {
  for (const Grammar& g : {islp::testing::sk5(), islp::testing::mixed_iter()}) {
    const Grammar u = unfold_all(g);
    CHECK(expand(u) == expand(g));
    for (VariableId v = 0; v < u.num_vars(); ++v)
      CHECK_FALSE(std::holds_alternative<Iter>(u.rule(v)));
  }
}

TEST_CASE("oracle limit") {
  const Grammar g = islp::testing::mixed_iter();
  CHECK_THROWS_AS(expand(g, g.start(), 100), RangeError);
  CHECK_NOTHROW(expand(g, g.start(), 1215));
}

TEST_CASE("power_sum_direct") {
  CHECK(power_sum_direct(1, 4, 1) == 10);
  CHECK(power_sum_direct(1, 3, 2) == 14);
  CHECK(power_sum_direct(3, 3, 4) == 81);
}
