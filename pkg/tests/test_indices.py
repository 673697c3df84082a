from math import comb

from focusfocus.indices import (
    MultiIndex,
    indices_of_degree,
    indices_up_to_degree,
    pack,
    packed_conjugate,
    packed_degree,
    packed_weight1,
    packed_weight2,
    unpack,
)


def test_pack_roundtrip():
    m = MultiIndex(3, 0, 2, 7)
    assert MultiIndex.from_packed(m.pack()) == m
    assert unpack(pack(1, 2, 3, 4)) == (1, 2, 3, 4)


def test_packed_addition_is_monomial_product():
    a = pack(1, 2, 0, 3)
    b = pack(4, 0, 5, 1)
    assert unpack(a + b) == (5, 2, 5, 4)


def test_degree_and_weights():
    m = MultiIndex(2, 1, 0, 3)
    assert m.degree() == 6
    assert m.weight1() == 2 - 1 + 0 - 3
    assert m.weight2() == 2 + 1 - 0 - 3
    k = m.pack()
    assert packed_degree(k) == m.degree()
    assert packed_weight1(k) == m.weight1()
    assert packed_weight2(k) == m.weight2()


def test_resonance_iff_weights_vanish():
    for m in indices_up_to_degree(6):
        assert m.is_resonant() == (m.weight1() == 0 and m.weight2() == 0)
        assert m.is_resonant() == (m.a1 == m.b2 and m.a2 == m.b1)


def test_conjugate_swaps_pairs():
    m = MultiIndex(1, 2, 3, 4)
    assert m.conjugate() == MultiIndex(3, 4, 1, 2)
    assert packed_conjugate(m.pack()) == m.conjugate().pack()


def test_enumeration_counts():
    for d in range(7):
        got = list(indices_of_degree(d))
        assert len(got) == comb(d + 3, 3)
        assert len(set(got)) == len(got)
        assert all(m.degree() == d for m in got)
