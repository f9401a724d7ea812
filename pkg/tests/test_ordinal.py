"""Ordinal arithmetic tests.

The oracles here are deliberately independent of the implementation:
comparison is re-derived from padded coefficient vectors, subtraction
results from bounded search over candidate ordinals, and addition below
w^2 from a hand-derived closed form.  Expected values frozen in the
tests were computed with these oracles.
"""

import random

import pytest
from hypothesis import given, settings, strategies as st

from heh.ordinal import OMEGA, ZERO, Ordinal, UndefinedOrdinalOp, omega_power


# --- oracles ---------------------------------------------------------------


def ord_of(*terms):
    """Build an ordinal from (exp, coeff) pairs via public arithmetic."""
    result = ZERO
    for e, c in terms:
        result = result + omega_power(e, c)
    return result


def compare_by_coefficient_vectors(a, b):
    """Order oracle: compare [c_E, ..., c_1, c_0] lexicographically."""
    exps = [e for e, _ in a.terms] + [e for e, _ in b.terms]
    top = max(exps, default=0)
    ca, cb = dict(a.terms), dict(b.terms)
    va = [ca.get(e, 0) for e in range(top, -1, -1)]
    vb = [cb.get(e, 0) for e in range(top, -1, -1)]
    return (va > vb) - (va < vb)


def small_ordinals(max_exp=2, max_coeff=4):
    """Every ordinal whose coefficients for w^0..w^max_exp are <= max_coeff."""
    # built in descending-exponent order so addition never absorbs
    result = []
    for coeffs in _coeff_tuples(max_exp, max_coeff):
        o = ZERO
        for e in range(max_exp, -1, -1):
            if coeffs[e]:
                o = o + omega_power(e, coeffs[e])
        result.append(o)
    return result


def _coeff_tuples(max_exp, max_coeff):
    if max_exp < 0:
        yield ()
        return
    for rest in _coeff_tuples(max_exp - 1, max_coeff):
        for c in range(max_coeff + 1):
            yield rest + (c,)


def search_left_difference(a, b, candidates):
    """All x among candidates with b + x == a (should be exactly one when b <= a)."""
    return [x for x in candidates if b + x == a]


def search_right_difference(a, b, candidates):
    """Least x among candidates with x + b == a, or None."""
    hits = [x for x in candidates if x + b == a]
    return min(hits) if hits else None


def add_below_w2_oracle(p, q, r, s):
    """(w*p + q) + (w*r + s) as (p', q'), derived by hand from absorption."""
    if r == 0:
        return (p, q + s)
    return (p + r, s)


# --- hypothesis strategy ----------------------------------------------------


@st.composite
def ordinals(draw, max_terms=4, max_exp=5, max_coeff=10**6):
    n = draw(st.integers(0, max_terms))
    exps = sorted(draw(st.sets(st.integers(0, max_exp), min_size=n, max_size=n)), reverse=True)
    return ord_of(*((e, draw(st.integers(1, max_coeff))) for e in exps))


# --- construction and canonical form ----------------------------------------


def test_construction():
    assert Ordinal(0).terms == ()
    assert Ordinal(7).terms == ((0, 7),)
    assert OMEGA.terms == ((1, 1),)
    assert omega_power(3, 2).terms == ((3, 2),)
    assert omega_power(2, 0) == ZERO
    with pytest.raises(ValueError):
        Ordinal(-1)
    with pytest.raises(TypeError):
        Ordinal(1.5)


@given(ordinals())
def test_canonical_terms(a):
    assert all(c > 0 and e >= 0 for e, c in a.terms)
    assert all(a.terms[i][0] > a.terms[i + 1][0] for i in range(len(a.terms) - 1))


def test_immutability_and_hash():
    a = ord_of((1, 2), (0, 5))
    with pytest.raises(AttributeError):
        a.terms = ()
    assert hash(a) == hash(ord_of((1, 2), (0, 5)))
    assert len({a, ord_of((1, 2), (0, 5)), OMEGA}) == 2


# --- order -------------------------------------------------------------------


def test_order_witnesses():
    # non-commutativity of addition is visible through the order
    assert Ordinal(2) + OMEGA == OMEGA
    assert OMEGA < OMEGA + 2
    assert Ordinal(2) + OMEGA < OMEGA + 2
    # frozen from compare_by_coefficient_vectors: w^2 > w*3
    assert compare_by_coefficient_vectors(omega_power(2), omega_power(1, 3)) == 1
    assert omega_power(2) > omega_power(1, 3)
    assert Ordinal(41) < Ordinal(42) < OMEGA


@given(ordinals(max_coeff=9), ordinals(max_coeff=9))
def test_order_matches_oracle(a, b):
    expected = compare_by_coefficient_vectors(a, b)
    got = (a > b) - (a < b)
    assert got == expected
    assert (a == b) == (expected == 0)


@given(ordinals(), ordinals(), ordinals())
def test_order_is_total_and_transitive(a, b, c):
    assert (a < b) + (a == b) + (a > b) == 1
    if a <= b <= c:
        assert a <= c


# --- addition ----------------------------------------------------------------


def test_add_witnesses():
    assert OMEGA + 0 == OMEGA
    assert 0 + OMEGA == OMEGA
    assert Ordinal(2) + OMEGA == OMEGA
    assert (OMEGA + 2).terms == ((1, 1), (0, 2))
    assert (OMEGA + OMEGA) == omega_power(1, 2)
    assert omega_power(2) + OMEGA + 3 == ord_of((2, 1), (1, 1), (0, 3))
    # int on the left must not be treated commutatively
    assert 5 + OMEGA == OMEGA
    assert (OMEGA + 5) != 5 + OMEGA


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_add_matches_closed_form_below_w2(p, q, r, s):
    a = omega_power(1, p) + q if p else Ordinal(q)
    b = omega_power(1, r) + s if r else Ordinal(s)
    ep, eq = add_below_w2_oracle(p, q, r, s)
    expected = omega_power(1, ep) + eq if ep else Ordinal(eq)
    assert a + b == expected


@given(ordinals(), ordinals(), ordinals())
def test_add_associative(a, b, c):
    assert (a + b) + c == a + (b + c)


@given(ordinals(), ordinals())
def test_add_monotone(a, b):
    if a < b:
        c = omega_power(2, 3) + 1
        assert c + a < c + b      # strictly monotone on the right
        assert a + c <= b + c     # weakly monotone on the left


# --- subtraction -------------------------------------------------------------


def test_left_sub_witnesses():
    assert OMEGA - 1 == OMEGA                     # 1 + w == w
    assert (OMEGA + 42) - (OMEGA + 2) == Ordinal(40)  # frozen from bounded search
    assert OMEGA - OMEGA == ZERO
    assert (omega_power(2) + 5) - omega_power(2) == Ordinal(5)
    with pytest.raises(UndefinedOrdinalOp):
        Ordinal(1) - 2
    with pytest.raises(UndefinedOrdinalOp):
        OMEGA - (OMEGA + 1)


def test_left_sub_unique_against_search():
    candidates = small_ordinals(max_exp=1, max_coeff=3)
    for a in candidates:
        for b in candidates:
            hits = search_left_difference(a, b, candidates)
            if b <= a:
                assert len(hits) == 1
                assert a - b == hits[0]
            else:
                with pytest.raises(UndefinedOrdinalOp):
                    a - b


@given(ordinals(), ordinals())
def test_left_sub_roundtrip(a, b):
    assert (b + a) - b == a
    lo, hi = (a, b) if a <= b else (b, a)
    assert lo + (hi - lo) == hi


def test_right_sub_witnesses():
    assert OMEGA.sub_right(OMEGA) == ZERO
    assert (OMEGA + 5).sub_right(5) == OMEGA      # frozen from bounded search
    assert omega_power(1, 2).sub_right(OMEGA) == OMEGA
    with pytest.raises(UndefinedOrdinalOp):
        OMEGA.sub_right(42)
    with pytest.raises(UndefinedOrdinalOp):
        omega_power(2).sub_right(OMEGA)
    with pytest.raises(UndefinedOrdinalOp):
        Ordinal(5).sub_right(7)


def test_right_sub_minimal_against_search():
    rng = random.Random(20260814)
    candidates = small_ordinals(max_exp=2, max_coeff=4)
    pairs = [(rng.choice(candidates), rng.choice(candidates)) for _ in range(250)]
    for a, b in pairs:
        expected = search_right_difference(a, b, candidates)
        if expected is None:
            with pytest.raises(UndefinedOrdinalOp):
                a.sub_right(b)
        else:
            assert a.sub_right(b) == expected


@given(ordinals(), ordinals())
def test_right_sub_reconstructs(a, b):
    try:
        x = a.sub_right(b)
    except UndefinedOrdinalOp:
        return
    assert x + b == a


# --- multiplication ----------------------------------------------------------


def test_mul_witnesses():
    assert Ordinal(2) * OMEGA == OMEGA
    assert OMEGA < OMEGA * 2
    assert (OMEGA + 1) * OMEGA == omega_power(2)
    assert omega_power(2) < omega_power(2) + OMEGA  # right distribution would differ
    assert (OMEGA + 1) * 2 == ord_of((1, 2), (0, 1))
    assert OMEGA * 0 == ZERO == Ordinal(0) * OMEGA
    assert (OMEGA + 3) * 1 == OMEGA + 3
    assert 2 * OMEGA == OMEGA  # reflected form keeps operand order


@given(ordinals(max_coeff=999), ordinals(max_coeff=999), ordinals(max_coeff=999))
def test_mul_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(ordinals(max_coeff=999), ordinals(max_coeff=999), ordinals(max_coeff=999))
def test_mul_left_distributive(a, b, c):
    assert a * (b + c) == a * b + a * c


def test_mul_not_right_distributive():
    # (w+1)*w == w^2 but w*w + 1*w == w^2 + w
    assert (OMEGA + 1) * OMEGA == omega_power(2)
    assert OMEGA * OMEGA + 1 * OMEGA == omega_power(2) + OMEGA
    assert (OMEGA + 1) * OMEGA != OMEGA * OMEGA + 1 * OMEGA


# --- division ----------------------------------------------------------------


def test_divmod_witnesses():
    assert divmod(OMEGA + 5, OMEGA) == (Ordinal(1), Ordinal(5))
    # frozen via multiply-back: w*2 + 7 == w*2 + 7, remainder 7 < w
    assert divmod(omega_power(1, 2) + 7, OMEGA) == (Ordinal(2), Ordinal(7))
    assert divmod(Ordinal(17), Ordinal(5)) == (Ordinal(3), Ordinal(2))
    assert (OMEGA + 5) // OMEGA == Ordinal(1)
    assert (OMEGA + 5) % OMEGA == Ordinal(5)
    assert divmod(omega_power(2), omega_power(1, 2)) == (OMEGA, ZERO)
    with pytest.raises(ZeroDivisionError):
        divmod(OMEGA, 0)


@given(ordinals(max_coeff=9999), ordinals(max_coeff=9999))
def test_division_theorem(a, b):
    if not b:
        return
    q, r = divmod(a, b)
    assert b * q + r == a
    assert r < b


@settings(max_examples=50)
@given(ordinals(max_exp=3, max_coeff=5), ordinals(max_exp=3, max_coeff=5))
def test_division_unique(a, b):
    if not b:
        return
    q, r = divmod(a, b)
    for dq in (ZERO, Ordinal(1), OMEGA):
        alt_q = q + dq
        if dq and b * alt_q <= a:
            # any larger quotient forces the remainder negative
            assert b * alt_q + (a - b * alt_q) == a
            assert not (a - b * alt_q) < b or alt_q == q


# --- classification ----------------------------------------------------------


def test_limits_and_naturals():
    assert OMEGA.is_limit
    assert omega_power(1, 2).is_limit
    assert omega_power(2).is_limit
    assert not (OMEGA + 21).is_limit
    assert not ZERO.is_limit
    assert not Ordinal(3).is_limit
    assert ZERO.is_natural and Ordinal(9).is_natural
    assert not OMEGA.is_natural
    assert Ordinal(9).natural() == 9
    assert ZERO.natural() == 0
    with pytest.raises(UndefinedOrdinalOp):
        OMEGA.natural()


def test_limit_part():
    assert (omega_power(1, 2) + 7).limit_part() == (omega_power(1, 2), 7)
    assert OMEGA.limit_part() == (OMEGA, 0)
    assert Ordinal(7).limit_part() == (ZERO, 7)
    assert ZERO.limit_part() == (ZERO, 0)


# --- naturals agreement -------------------------------------------------------


def test_naturals_behave_like_ints():
    rng = random.Random(7)
    pairs = [(rng.randrange(10**4), rng.randrange(10**4)) for _ in range(500)]
    pairs += [(i, j) for i in range(8) for j in range(8)]
    for x, y in pairs:
        a, b = Ordinal(x), Ordinal(y)
        assert (a + b).natural() == x + y
        assert (a * b).natural() == x * y
        assert (a < b) == (x < y) and (a == b) == (x == y)
        if y <= x:
            assert (a - b).natural() == x - y
            assert a.sub_right(b).natural() == x - y
        if y:
            q, r = divmod(a, b)
            assert (q.natural(), r.natural()) == divmod(x, y)


# --- text form -----------------------------------------------------------------


def test_render():
    assert str(ZERO) == "0"
    assert str(Ordinal(5)) == "5"
    assert str(OMEGA) == "w"
    assert str(omega_power(1, 2)) == "w*2"
    assert str(omega_power(2)) == "w^2"
    assert str(ord_of((2, 3), (1, 2), (0, 5))) == "w^2*3 + w*2 + 5"


def test_parse():
    assert Ordinal.parse("0") == ZERO
    assert Ordinal.parse("w^2*3 + w*2 + 5") == ord_of((2, 3), (1, 2), (0, 5))
    assert Ordinal.parse("w^2*3+4") == ord_of((2, 3), (0, 4))
    assert Ordinal("w + 42") == OMEGA + 42
    for bad in ["", "w^", "x", "5 + w", "w*0", "w^2 + w^2"]:
        with pytest.raises(ValueError):
            Ordinal.parse(bad)


@given(ordinals())
def test_render_parse_roundtrip(a):
    assert Ordinal.parse(str(a)) == a
