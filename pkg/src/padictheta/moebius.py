"""Projective points and 2x2 matrices acting on the q-adic projective line.

Matrices are stored with bounded-precision entries and multiplied with the
lenient adders, because word algebra produces exact structural zeros (think
off-diagonal entries of a conjugated diagonal matrix).  Normalization scales
a matrix to determinant one whenever the determinant has a square root in
Q_q; group-level code insists on that for basis elements and reports a
configuration problem otherwise.
"""

from __future__ import annotations

from .errors import DomainError, GroupError, PrecisionExhausted, VerificationError
from .field import (
    FieldSpec,
    PadicNumber,
    _coerce,
    dev_val,
    hensel_sqrt,
    lenient_add,
    lenient_sub,
)


class P1Point:
    """A point of the projective line: a field value, or the point at infinity."""

    __slots__ = ("value",)

    def __init__(self, value: PadicNumber | None = None):
        self.value = value

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def __repr__(self) -> str:
        return "oo" if self.value is None else repr(self.value)

    def __eq__(self, other) -> bool:
        if not isinstance(other, P1Point):
            return NotImplemented
        return self.value == other.value

    def __hash__(self) -> int:
        return hash(self.value)


INFINITY = P1Point(None)


def finite_point(x: PadicNumber) -> P1Point:
    return P1Point(x)


def points_agree(a: P1Point, b: P1Point) -> bool:
    """Numeric agreement at shared precision; infinity only matches infinity."""
    if a.is_infinity or b.is_infinity:
        return a.is_infinity and b.is_infinity
    return dev_val(a.value, b.value) is None


class ProjectiveMatrix:
    """A 2x2 matrix over Q_q acting on the projective line by fractions.

    The unimodular flag records that the determinant is pinned to one, which
    products preserve; everything else about the action is insensitive to
    scaling the matrix.
    """

    __slots__ = ("spec", "m00", "m01", "m10", "m11", "unimodular")

    def __init__(self, spec: FieldSpec, m00, m01, m10, m11, unimodular: bool = False):
        self.spec = spec
        self.m00 = _coerce(spec, m00)
        self.m01 = _coerce(spec, m01)
        self.m10 = _coerce(spec, m10)
        self.m11 = _coerce(spec, m11)
        self.unimodular = unimodular

    @classmethod
    def from_rows(cls, spec: FieldSpec, rows) -> "ProjectiveMatrix":
        (a, b), (c, d) = rows
        return cls(spec, a, b, c, d)

    @classmethod
    def identity(cls, spec: FieldSpec) -> "ProjectiveMatrix":
        return cls(spec, 1, 0, 0, 1, unimodular=True)

    def entries(self) -> tuple[PadicNumber, PadicNumber, PadicNumber, PadicNumber]:
        return (self.m00, self.m01, self.m10, self.m11)

    def __repr__(self) -> str:
        return f"[[{self.m00!r}, {self.m01!r}], [{self.m10!r}, {self.m11!r}]]"

    # algebra

    def __mul__(self, other: "ProjectiveMatrix") -> "ProjectiveMatrix":
        if not isinstance(other, ProjectiveMatrix):
            return NotImplemented
        a, b = self, other
        return ProjectiveMatrix(
            self.spec,
            lenient_add(a.m00 * b.m00, a.m01 * b.m10),
            lenient_add(a.m00 * b.m01, a.m01 * b.m11),
            lenient_add(a.m10 * b.m00, a.m11 * b.m10),
            lenient_add(a.m10 * b.m01, a.m11 * b.m11),
            unimodular=a.unimodular and b.unimodular,
        )

    def inverse(self) -> "ProjectiveMatrix":
        """Projective inverse by adjugate; exact when unimodular, and off by
        the (nonzero) determinant factor otherwise, which the action ignores."""
        return ProjectiveMatrix(
            self.spec, self.m11, -self.m01, -self.m10, self.m00, unimodular=self.unimodular
        )

    def __pow__(self, n: int) -> "ProjectiveMatrix":
        if n < 0:
            return self.inverse() ** (-n)
        out = ProjectiveMatrix.identity(self.spec)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def conjugate_by(self, u: "ProjectiveMatrix") -> "ProjectiveMatrix":
        return u * self * u.inverse()

    def determinant(self) -> PadicNumber:
        return lenient_sub(self.m00 * self.m11, self.m01 * self.m10)

    def trace(self) -> PadicNumber:
        return lenient_add(self.m00, self.m11)

    @property
    def is_scalar(self) -> bool:
        """Projectively the identity: certified-zero off-diagonals and equal
        diagonal entries at all shared digits."""
        return (
            self.m01.is_zero
            and self.m10.is_zero
            and dev_val(self.m00, self.m11) is None
        )

    def scaled(self, c) -> "ProjectiveMatrix":
        c = _coerce(self.spec, c)
        return ProjectiveMatrix(
            self.spec, self.m00 * c, self.m01 * c, self.m10 * c, self.m11 * c
        )

    def normalized(self, det_hint: PadicNumber | None = None) -> "ProjectiveMatrix":
        """Scale to determinant one when the determinant is a square in Q_q;
        otherwise scale the entries to minimal valuation zero.  The unimodular
        flag records which case happened.

        A det_hint supplies the exact determinant (say, from integer input
        data).  It is checked digit for digit against the computed one and
        then used for the scaling, which preserves the full digit window that
        the cancellation in the numeric determinant would otherwise eat."""
        det = self.determinant()
        if det.is_zero and det_hint is None:
            raise GroupError("matrix is singular at working precision")
        if det_hint is not None:
            if dev_val(det, det_hint) is not None:
                raise GroupError("determinant hint contradicts the matrix entries")
            det = det_hint
            if det.is_zero:
                raise GroupError("matrix is singular at working precision")
        try:
            s = hensel_sqrt(det)
        except DomainError:
            m = min(e.valuation() for e in self.entries() if not e.is_zero)
            out = ProjectiveMatrix(
                self.spec,
                self.m00.shift(-m),
                self.m01.shift(-m),
                self.m10.shift(-m),
                self.m11.shift(-m),
                unimodular=False,
            )
            return out
        inv = s.inverse()
        return ProjectiveMatrix(
            self.spec,
            self.m00 * inv,
            self.m01 * inv,
            self.m10 * inv,
            self.m11 * inv,
            unimodular=True,
        )

    # action on the projective line

    def apply(self, z: P1Point) -> P1Point:
        """Image of the point under the fractional action.

        A certified-zero denominator against a known-nonzero numerator
        collapses to infinity: the true image is then within q^-b of the
        point at infinity for the certified bound b, and infinity is the
        only representable answer.  A simultaneous zero is indeterminate."""
        if z.is_infinity:
            num, den = self.m00, self.m10
        else:
            num = lenient_add(self.m00 * z.value, self.m01)
            den = lenient_add(self.m10 * z.value, self.m11)
        if den.is_zero:
            if not num.is_zero:
                return INFINITY
            raise PrecisionExhausted(
                "image indeterminate: numerator and denominator both vanish "
                "at working precision"
            )
        return P1Point(num / den)

    # fixed points and diagonalization

    def fixed_points(self) -> tuple[P1Point, P1Point]:
        """Both fixed points, ordered by the square-root sign convention
        (the plus root first); raises when the discriminant has no square
        root in Q_q or the points collide at working precision."""
        t = lenient_sub(self.m00, self.m11)
        if self.m10.is_zero:
            # infinity is fixed; the finite one solves (m00 - m11) z = m01
            if t.is_zero:
                if self.m01.is_zero:
                    raise DomainError("scalar matrix fixes every point")
                raise DomainError("translation: single fixed point at infinity")
            return (P1Point(self.m01 / t), INFINITY)
        # m10 nonzero keeps both fixed points finite
        if self.unimodular:
            # same discriminant through the trace: near-zero traces would
            # otherwise cancel most of the digit window against 4*det
            tr = self.trace()
            disc = lenient_sub(tr * tr, 4)
        else:
            disc = lenient_add(t * t, 4 * (self.m01 * self.m10))
        if disc.is_zero:
            raise DomainError("fixed points collide at working precision")
        s = hensel_sqrt(disc)
        half = (2 * self.m10).inverse()
        return (P1Point(lenient_add(t, s) * half), P1Point(lenient_sub(t, s) * half))

    def moving_to_zero_and_infinity(self, o: P1Point, e: P1Point) -> "ProjectiveMatrix":
        """The fractional map sending o to 0 and e to infinity."""
        if o.is_infinity and e.is_infinity:
            raise DomainError("the two anchor points must differ")
        if o.is_infinity:
            return ProjectiveMatrix(self.spec, 0, 1, 1, -e.value)
        if e.is_infinity:
            return ProjectiveMatrix(self.spec, 1, -o.value, 0, 1)
        return ProjectiveMatrix(self.spec, 1, -o.value, 1, -e.value)

    def diagonalize(self) -> tuple["ProjectiveMatrix", PadicNumber]:
        """Conjugator u with u self u^-1 diagonal, and the multiplier, the
        ratio of the diagonal entries (first fixed point over second)."""
        o, e = self.fixed_points()
        u = self.moving_to_zero_and_infinity(o, e)
        d = u * self * u.inverse()
        if not (d.m01.is_zero and d.m10.is_zero):
            raise VerificationError("conjugated matrix is not diagonal at working precision")
        return u, d.m00 / d.m11

    def projective_order(self, limit: int = 12) -> int | None:
        """Least k with the k-th power scalar, or None up to the limit."""
        acc = self
        for k in range(1, limit + 1):
            if acc.is_scalar:
                return k
            acc = acc * self
        return None
