"""Field arithmetic: frozen oracle values, precision contracts, invariants."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padictheta import (
    ConfigError,
    DomainError,
    FieldSpec,
    PrecisionExhausted,
    dev_val,
    hensel_sqrt,
    primitive_root_of_unity,
    teichmuller,
)
from padictheta.field import lenient_add, lenient_sub, smallest_primitive_root

Q7 = FieldSpec(q=7, N=2, p=3)
Q5 = FieldSpec(q=5, N=20, p=2)


def frobenius_fixed_point(c: int, q: int, N: int) -> int:
    """Independent oracle for the multiplicative digit lift: iterating the
    q-power map modulo q^N stabilizes on it."""
    a = c % q**N
    for _ in range(N + 4):
        b = pow(a, q, q**N)
        if b == a:
            return a
        a = b
    raise AssertionError("q-power iteration did not stabilize")


def brute_force_sqrt(x: int, q: int, N: int) -> int:
    """Independent oracle: exhaustive root search with the leading-digit
    convention (first digit in [1, (q-1)/2]).  Only viable for tiny q^N."""
    roots = [y for y in range(q**N) if y * y % q**N == x % q**N and 1 <= y % q <= (q - 1) // 2]
    assert len(roots) == 1
    return roots[0]


class TestFieldSpecValidation:
    def test_rejects_composite_residue(self):
        with pytest.raises(ConfigError):
            FieldSpec(q=6, N=4, p=2)

    def test_rejects_nonpositive_precision(self):
        with pytest.raises(ConfigError):
            FieldSpec(q=5, N=0, p=2)

    def test_rejects_composite_cover_degree(self):
        with pytest.raises(ConfigError):
            FieldSpec(q=5, N=4, p=4)

    def test_odd_cover_degree_needs_roots_of_unity(self):
        with pytest.raises(ConfigError):
            FieldSpec(q=5, N=4, p=3)
        FieldSpec(q=7, N=4, p=3)


class TestRepresentation:
    def test_render_nonzero(self):
        x = Q7.integer(30)
        assert repr(x) == "[2, 4]*7^0 + O(7^2)"

    def test_render_zero_forms(self):
        assert repr(Q7.zero()) == "0"
        assert repr(Q7.zero(bound=2)) == "O(7^2)"

    def test_unit_normalization(self):
        x = Q5.integer(250)  # 2 * 5^3
        assert x.valuation() == 3
        assert x.first_digit() == 2

    def test_negative_rational_valuation(self):
        x = Q5.rational(7, 125)
        assert x.valuation() == -3
        assert (x * 125).agrees_with(Q5.integer(7))

    def test_lift_mod_roundtrip(self):
        x = Q5.integer(123456)
        assert x.lift_mod(8) == 123456 % 5**8

    def test_lift_mod_negative_valuation_rejected(self):
        with pytest.raises(DomainError):
            Q5.rational(1, 5).lift_mod(2)


class TestStrictAndLenient:
    def test_full_cancellation_raises(self):
        x = Q7.integer(3)
        with pytest.raises(PrecisionExhausted):
            x - 3

    def test_lenient_difference_certifies_bound(self):
        d = lenient_sub(Q7.integer(3), Q7.integer(3))
        assert d.is_zero and d.v == 2  # zero modulo 7^2

    def test_partial_cancellation_survives(self):
        # 1 + 7 minus 1 leaves one trusted digit at valuation 1
        x = Q7.integer(8) - 1
        assert x.valuation() == 1
        assert x.r == 1

    def test_division_by_certified_zero_raises(self):
        z = lenient_sub(Q7.integer(3), Q7.integer(3))
        with pytest.raises(PrecisionExhausted):
            Q7.one() / z

    def test_division_by_exact_zero_raises(self):
        with pytest.raises(ZeroDivisionError):
            Q7.one() / Q7.zero()

    def test_dev_val_agreement_and_disagreement(self):
        assert dev_val(Q7.integer(3), Q7.integer(3)) is None
        assert dev_val(Q7.integer(3), Q7.integer(10)) == 1
        assert dev_val(Q7.integer(3), Q7.integer(4)) == 0

    def test_lenient_add_of_certified_zeros(self):
        a, b = Q7.zero(bound=5), Q7.zero(bound=3)
        c = lenient_add(a, b)
        assert c.is_zero and c.v == 3


class TestTeichmuller:
    def test_frozen_value_matches_oracle(self):
        t = teichmuller(Q7, 2)
        assert t.lift_mod(2) == 30
        assert t.lift_mod(2) == frobenius_fixed_point(2, 7, 2)

    def test_oracle_agreement_high_precision(self):
        for c in (2, 3, 4, 6):
            t = teichmuller(Q5, c)
            assert t.lift_mod(20) == frobenius_fixed_point(c, 5, 20)

    def test_is_root_of_unity(self):
        t = teichmuller(Q5, 3)
        assert (t**4).agrees_with(Q5.one())

    def test_rejects_non_unit(self):
        with pytest.raises(DomainError):
            teichmuller(Q5, 10)

    @settings(max_examples=60, deadline=None)
    @given(a=st.integers(1, 10**6), b=st.integers(1, 10**6))
    def test_multiplicative(self, a, b):
        if a % 5 == 0 or b % 5 == 0:
            return
        assert teichmuller(Q5, a * b) == teichmuller(Q5, a) * teichmuller(Q5, b)


class TestRootsOfUnity:
    def test_smallest_primitive_root(self):
        assert smallest_primitive_root(7) == 3
        assert smallest_primitive_root(5) == 2

    def test_frozen_cube_root_in_q7(self):
        z = primitive_root_of_unity(Q7, 3)
        assert z.lift_mod(1) == 2
        assert z.lift_mod(2) == 30

    def test_orders(self):
        z = primitive_root_of_unity(Q7, 3)
        assert not (z - 1).is_zero
        assert not (z**2 - 1).is_zero
        assert (z**3).agrees_with(Q7.one())

    def test_order_two_is_minus_one(self):
        m = primitive_root_of_unity(Q5, 2)
        assert m.agrees_with(Q5.integer(-1))

    def test_unavailable_order_rejected(self):
        with pytest.raises(DomainError):
            primitive_root_of_unity(Q5, 3)


class TestHenselSqrt:
    def test_frozen_value_matches_brute_force(self):
        s = hensel_sqrt(Q7.integer(2))
        assert s.lift_mod(2) == 10
        assert s.lift_mod(2) == brute_force_sqrt(2, 7, 2)

    def test_sign_convention(self):
        for x in (6, 11, 14, 19, 21, 24):
            s = hensel_sqrt(Q5.integer(x))
            assert 1 <= s.first_digit() <= 2
            assert dev_val(s * s, Q5.integer(x)) is None

    def test_even_valuation_descends(self):
        s = hensel_sqrt(Q5.integer(4 * 25))
        assert s.valuation() == 1
        assert (s * s).agrees_with(Q5.integer(100))

    def test_odd_valuation_rejected(self):
        with pytest.raises(DomainError):
            hensel_sqrt(Q5.integer(5))

    def test_non_residue_rejected(self):
        with pytest.raises(DomainError):
            hensel_sqrt(Q5.integer(2))  # 2 is not a square modulo 5

    def test_q2_unit_one_mod_eight(self):
        H = FieldSpec(q=2, N=8, p=2)
        s = hensel_sqrt(H.integer(17))
        assert (s * s).lift_mod(7) == 17
        assert s.lift_mod(2) == 1  # root pinned to 1 modulo 4

    def test_q2_rejects_other_units(self):
        H = FieldSpec(q=2, N=8, p=2)
        with pytest.raises(DomainError):
            hensel_sqrt(H.integer(3))

    @settings(max_examples=60, deadline=None)
    @given(a=st.integers(-(10**6), 10**6))
    def test_roundtrip_on_squares(self, a):
        if a == 0:
            return
        s = hensel_sqrt(Q5.integer(a * a))
        assert dev_val(s * s, Q5.integer(a * a)) is None


class TestValuationAxioms:
    @settings(max_examples=100, deadline=None)
    @given(
        a=st.integers(-(10**8), 10**8),
        b=st.integers(-(10**8), 10**8),
    )
    def test_ultrametric_and_multiplicativity(self, a, b):
        if a == 0 or b == 0:
            return
        x, y = Q5.integer(a), Q5.integer(b)
        assert (x * y).valuation() == x.valuation() + y.valuation()
        s = lenient_add(x, y)
        lower = min(x.valuation(), y.valuation())
        if s.is_zero:
            assert s.v >= lower
        else:
            assert s.valuation() >= lower
            if x.valuation() != y.valuation():
                assert s.valuation() == lower

    @settings(max_examples=100, deadline=None)
    @given(a=st.integers(-(10**8), 10**8), d=st.integers(1, 10**6))
    def test_inverse_roundtrip(self, a, d):
        if a == 0:
            return
        x = Q5.rational(a, d)
        assert dev_val(x * x.inverse(), Q5.one()) is None

    @settings(max_examples=100, deadline=None)
    @given(a=st.integers(-(10**8), 10**8), b=st.integers(-(10**8), 10**8), c=st.integers(-(10**8), 10**8))
    def test_distributivity_certified(self, a, b, c):
        if a == 0 or b == 0 or c == 0 or b + c == 0:
            return
        x, y, z = Q5.integer(a), Q5.integer(b), Q5.integer(c)
        lhs = x * lenient_add(y, z)
        rhs = lenient_add(x * y, x * z)
        assert dev_val(lhs, rhs) is None
