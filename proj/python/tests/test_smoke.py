from fractions import Fraction

import pytest

import islp

S5 = "abaabaaabaaaabaaaaab"


def test_access_and_extract():
    g = islp.gen_sk(5)
    assert g.size == 8 and g.n == 20 and g.height == 1 and g.max_degree == 1
    idx = islp.Index(g)
    assert idx.access(14) == "b"
    assert "".join(idx.access(l) for l in range(1, 21)) == S5
    assert idx.extract(3, 6) == b"aabaaa"
    assert idx.access_stats(14)["evaluations"] >= 1
    with pytest.raises(islp.RangeError):
        idx.access(21)
    with pytest.raises(IndexError):
        idx.access(0)


def test_parse_emit_round_trip():
    g = islp.random_islp(7)
    assert islp.Grammar.parse(g.emit()) == g
    with pytest.raises(islp.GrammarError):
        islp.Grammar.parse("S = T\nstart S\n")


def test_big_lengths_are_python_ints():
    g = islp.Grammar.parse("a = 'a'\nS = prod i in 1..1000000 { a^(i^3) }\nstart S\n")
    k = 1_000_000
    assert g.n == (k * (k + 1) // 2) ** 2
    assert islp.Index(g).access(g.n) == "a"


def test_transforms():
    g = islp.gen_sk(5)
    assert islp.reverse(g).expand() == S5[::-1]
    assert islp.clamp_degree(g).expand() == S5
    assert islp.apply_morphism(g, {"b": "ba"}).expand() == S5.replace("b", "ba")
    assert islp.edit(g, "sub", 14, "a").expand() == "abaabaaabaaaaaaaaaab"
    assert islp.edit(g, "del", 1).expand() == S5[1:]


def test_balance():
    g = islp.gen_left_chain(256)
    b, stats = islp.balance(g)
    assert b.expand() == "a" * 256
    assert stats["old_height"] == 255
    assert stats["new_height"] == b.height <= 4 * 8


def test_measures():
    assert islp.lz76_z(b"aaaa") == 2
    assert islp.delta(b"ab") == Fraction(2)
    assert islp.delta(islp.gen_sk(5).expand().encode()) <= islp.lz76_z(S5.encode())
    runs = {islp.bwt_runs(islp.gen_fibonacci(i)) for i in (8, 10, 12)}
    assert len(runs) == 1
    assert islp.gen_thue_morse_concat([5, 3]) == b"abbab|abb"
