"""Projective action, normalization, fixed points, diagonalization."""

import pytest

from padictheta import DomainError, FieldSpec
from padictheta.field import dev_val
from padictheta.moebius import INFINITY, P1Point, ProjectiveMatrix, points_agree

F = FieldSpec(q=5, N=20, p=2)


def mat(rows, spec=F):
    return ProjectiveMatrix.from_rows(spec, rows)


class TestAction:
    def test_moebius_fraction(self):
        m = mat([[1, 2], [3, 4]])
        z = m.apply(P1Point(F.integer(1)))
        assert z.value.agrees_with(F.rational(3, 7))

    def test_infinity_maps_to_entry_ratio(self):
        m = mat([[1, 2], [3, 4]])
        assert m.apply(INFINITY).value.agrees_with(F.rational(1, 3))

    def test_pole_goes_to_infinity(self):
        m = mat([[0, 1], [1, 0]])
        assert m.apply(P1Point(F.zero())).is_infinity

    def test_action_is_scale_invariant(self):
        m = mat([[1, 2], [3, 4]])
        z = P1Point(F.integer(7))
        assert points_agree(m.apply(z), m.scaled(10).apply(z))

    def test_product_composes_action(self):
        a, b = mat([[1, 2], [3, 4]]), mat([[2, 1], [0, 1]])
        z = P1Point(F.integer(7))
        assert points_agree((a * b).apply(z), a.apply(b.apply(z)))


class TestNormalization:
    def test_square_determinant_becomes_one(self):
        m = mat([[2, 15621], [1, -2]])  # determinant -5^6, a square in Q_5
        n = m.normalized()
        assert n.unimodular
        assert n.determinant().agrees_with(F.one())

    def test_det_hint_preserves_digit_window(self):
        m = mat([[2, 15621], [1, -2]])
        plain = m.normalized()
        hinted = m.normalized(det_hint=F.integer(-(5**6)))
        assert hinted.unimodular
        assert hinted.m00.r > plain.m00.r

    def test_wrong_det_hint_rejected(self):
        from padictheta import GroupError

        m = mat([[2, 15621], [1, -2]])
        with pytest.raises(GroupError):
            m.normalized(det_hint=F.integer(5**6))

    def test_nonsquare_det_scales_to_level_zero(self):
        m = mat([[2, 0], [0, 1]])  # determinant 2, not a square modulo 5
        n = m.normalized()
        assert not n.unimodular
        assert min(e.valuation() for e in n.entries() if not e.is_zero) == 0

    def test_unimodular_products_stay_unimodular(self):
        m = mat([[2, 15621], [1, -2]]).normalized()
        assert (m * m).unimodular
        assert (m * m.inverse()).is_scalar


class TestFixedPoints:
    def test_involution_fixed_points_ordered_by_sign_convention(self):
        m = mat([[0, 1], [1, 0]])
        zp, zm = m.fixed_points()
        assert zp.value.agrees_with(F.one())
        assert zm.value.agrees_with(F.integer(-1))

    def test_fixed_points_are_fixed(self):
        m = mat([[2, 15621], [1, -2]])
        for fp in m.fixed_points():
            assert points_agree(m.apply(fp), fp)

    def test_upper_triangular_keeps_infinity(self):
        m = mat([[2, 3], [0, 1]])
        finite, inf = m.fixed_points()
        assert inf.is_infinity
        assert finite.value.agrees_with(F.integer(3))

    def test_translation_rejected(self):
        with pytest.raises(DomainError):
            mat([[1, 3], [0, 1]]).fixed_points()

    def test_scalar_rejected(self):
        with pytest.raises(DomainError):
            mat([[2, 0], [0, 2]]).fixed_points()


class TestDiagonalization:
    def test_involution_multiplier_is_minus_one(self):
        m = mat([[0, 1], [1, 0]])
        _, mu = m.diagonalize()
        assert mu.agrees_with(F.integer(-1))

    def test_conjugator_moves_fixed_points(self):
        m = mat([[2, 15621], [1, -2]])
        o, e = m.fixed_points()
        u, mu = m.diagonalize()
        assert u.apply(o).value.is_zero
        assert u.apply(e).is_infinity
        assert not mu.is_zero

    def test_multiplier_of_diagonal_matrix(self):
        m = mat([[25, 0], [0, 1]])
        _, mu = m.diagonalize()
        assert mu.agrees_with(F.integer(25)) or mu.agrees_with(F.rational(1, 25))

    def test_projective_order_of_involution(self):
        assert mat([[0, 1], [1, 0]]).projective_order() == 2
        assert mat([[25, 0], [0, 1]]).projective_order(limit=6) is None


class TestOrderThreeFamily:
    def test_trace_squared_equals_det_gives_order_three(self):
        # [[0, b^2], [-1, b]] has trace b and determinant b^2
        G = FieldSpec(q=7, N=12, p=3)
        b = G.integer(49)
        m = ProjectiveMatrix(G, 0, b * b, -1, b)
        assert m.projective_order() == 3
        zp, zm = m.fixed_points()
        for fp in (zp, zm):
            assert points_agree(m.apply(fp), fp)
        _, mu = m.diagonalize()
        # multiplier is a primitive cube root of unity
        assert dev_val(mu**3, G.one()) is None
        assert dev_val(mu, G.one()) is not None
