"""Bounded-precision arithmetic in the unramified coefficient field Q_q.

A nonzero element is stored as unit * q^v with the unit trusted modulo q^r,
so every derived quantity knows how many digits of it are certified.
Quantities that cancel completely are kept as "zero modulo q^b" instead of
being collapsed to an exact zero; the verification routines lean on this to
certify agreement valuations between independently computed values.

Public arithmetic (the dunder operators) is strict: a sum or difference whose
trusted digits all cancel raises PrecisionExhausted, because the caller can no
longer tell the result apart from noise.  Composite algorithms that produce
structural zeros on purpose (matrix products, series at their vanishing
points) use the lenient module-level adders instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError, DomainError, PrecisionExhausted


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def _ival(n: int, q: int) -> int:
    """q-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of the integer zero is undefined")
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


def _factorize(n: int) -> list[int]:
    """Distinct prime factors by trial division; n stays small here."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field Q_q at working precision N, hosting a degree-p cover.

    q: residue prime of the field.
    N: number of trusted base-q digits carried through the computation.
    p: degree of the cyclic cover (prime).  For odd p the p-th roots of
       unity must already live in Q_q, which forces p | q-1.
    """

    q: int
    N: int
    p: int = 2

    def __post_init__(self) -> None:
        if not _is_prime(self.q):
            raise ConfigError(f"residue prime q={self.q} is not prime")
        if self.N < 1:
            raise ConfigError(f"working precision N={self.N} must be at least 1")
        if not _is_prime(self.p):
            raise ConfigError(f"cover degree p={self.p} is not prime")
        if self.p > 2 and (self.q - 1) % self.p != 0:
            raise ConfigError(
                f"p-th roots of unity must lie in Q_q: p={self.p} does not divide q-1={self.q - 1}"
            )

    # element constructors

    def integer(self, n: int) -> "PadicNumber":
        if n == 0:
            return PadicNumber(self, None, 0, 0)
        v = _ival(n, self.q)
        return PadicNumber(self, v, (n // self.q**v) % self.q**self.N, self.N)

    def rational(self, num: int, den: int = 1) -> "PadicNumber":
        if den == 0:
            raise ZeroDivisionError("rational with zero denominator")
        if num == 0:
            return PadicNumber(self, None, 0, 0)
        q, N = self.q, self.N
        a, b = _ival(num, q), _ival(den, q)
        u = (num // q**a) * pow(den // q**b, -1, q**N) % q**N
        return PadicNumber(self, a - b, u, N)

    def from_fraction(self, f: Fraction) -> "PadicNumber":
        return self.rational(f.numerator, f.denominator)

    def zero(self, bound: int | None = None) -> "PadicNumber":
        """Exact zero, or a quantity only known to vanish modulo q^bound."""
        return PadicNumber(self, bound, 0, 0)

    def one(self) -> "PadicNumber":
        return PadicNumber(self, 0, 1, self.N)


class PadicNumber:
    """One element of Q_q carrying its own precision certificate.

    Nonzero state: value = u * q^v with 0 < u < q^r, q not dividing u, and
    1 <= r <= spec.N trusted digits.  Zero state: u == 0 and v is the
    certified vanishing bound (the value is 0 mod q^v), or v is None for
    the exact zero.  Instances are immutable; build them through FieldSpec
    or the arithmetic operators.
    """

    __slots__ = ("spec", "v", "u", "r")

    def __init__(self, spec: FieldSpec, v: int | None, u: int, r: int):
        self.spec = spec
        self.v = v
        self.u = u
        self.r = r

    # state predicates

    @property
    def is_zero(self) -> bool:
        """True when no nonzero digit is known (exact zero included)."""
        return self.u == 0

    @property
    def is_exact_zero(self) -> bool:
        return self.u == 0 and self.v is None

    def valuation(self) -> int:
        if self.u == 0:
            raise PrecisionExhausted(
                "valuation undetermined: the value vanishes to working precision"
            )
        return self.v

    def abs_precision(self) -> int | None:
        """Exponent b such that the value is pinned down modulo q^b (None = exact)."""
        if self.u == 0:
            return self.v
        return self.v + self.r

    def first_digit(self) -> int:
        if self.u == 0:
            raise PrecisionExhausted("no leading digit: value vanishes to working precision")
        return self.u % self.spec.q

    # arithmetic

    def __neg__(self) -> "PadicNumber":
        if self.u == 0:
            return self
        return PadicNumber(self.spec, self.v, self.spec.q**self.r - self.u, self.r)

    def __add__(self, other) -> "PadicNumber":
        return _add(self, _coerce(self.spec, other), strict=True)

    def __radd__(self, other) -> "PadicNumber":
        return _add(_coerce(self.spec, other), self, strict=True)

    def __sub__(self, other) -> "PadicNumber":
        return _add(self, -_coerce(self.spec, other), strict=True)

    def __rsub__(self, other) -> "PadicNumber":
        return _add(_coerce(self.spec, other), -self, strict=True)

    def __mul__(self, other) -> "PadicNumber":
        return _mul(self, _coerce(self.spec, other))

    def __rmul__(self, other) -> "PadicNumber":
        return _mul(_coerce(self.spec, other), self)

    def __truediv__(self, other) -> "PadicNumber":
        return _mul(self, _coerce(self.spec, other).inverse())

    def __rtruediv__(self, other) -> "PadicNumber":
        return _mul(_coerce(self.spec, other), self.inverse())

    def __pow__(self, n: int) -> "PadicNumber":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return self.spec.one()
        if self.u == 0:
            if self.v is None:
                return self
            return PadicNumber(self.spec, self.v * n, 0, 0)
        base, out = self, None
        while n:
            if n & 1:
                out = base if out is None else _mul(out, base)
            n >>= 1
            if n:
                base = _mul(base, base)
        return out

    def inverse(self) -> "PadicNumber":
        if self.u == 0:
            if self.v is None:
                raise ZeroDivisionError("inverse of the exact zero")
            raise PrecisionExhausted(
                "division by a quantity with no known nonzero digit"
            )
        mod = self.spec.q**self.r
        return PadicNumber(self.spec, -self.v, pow(self.u, -1, mod), self.r)

    def shift(self, k: int) -> "PadicNumber":
        """Multiply by q^k without touching the trusted digits."""
        if self.u == 0:
            return PadicNumber(self.spec, None if self.v is None else self.v + k, 0, 0)
        return PadicNumber(self.spec, self.v + k, self.u, self.r)

    # comparisons: representation equality only; use dev_val for numeric agreement

    def __eq__(self, other) -> bool:
        if not isinstance(other, PadicNumber):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.v == other.v
            and self.u == other.u
            and self.r == other.r
        )

    def __hash__(self) -> int:
        return hash((self.spec.q, self.spec.N, self.v, self.u, self.r))

    def agrees_with(self, other) -> bool:
        return dev_val(self, _coerce(self.spec, other)) is None

    # rendering and lifts

    def digits(self) -> list[int]:
        """Base-q digits of the trusted unit window, least significant first."""
        if self.u == 0:
            return []
        q, u = self.spec.q, self.u
        out = []
        for _ in range(self.r):
            out.append(u % q)
            u //= q
        return out

    def lift_mod(self, k: int) -> int:
        """The integer in [0, q^k) congruent to the value modulo q^k."""
        if k < 0:
            raise ValueError("modulus exponent must be nonnegative")
        if self.u == 0:
            if self.v is None or self.v >= k:
                return 0
            raise PrecisionExhausted(
                f"zero certified only modulo q^{self.v}, requested modulo q^{k}"
            )
        if self.v < 0:
            raise DomainError("negative valuation: not an integral element")
        if self.v + self.r < k:
            raise PrecisionExhausted(
                f"value trusted modulo q^{self.v + self.r}, requested modulo q^{k}"
            )
        return self.u * self.spec.q**self.v % self.spec.q**k

    def __repr__(self) -> str:
        q = self.spec.q
        if self.u == 0:
            if self.v is None:
                return "0"
            return f"O({q}^{self.v})"
        return f"{self.digits()}*{q}^{self.v} + O({q}^{self.v + self.r})"


def _coerce(spec: FieldSpec, x) -> PadicNumber:
    if isinstance(x, PadicNumber):
        if x.spec != spec:
            raise DomainError("mixing elements of different coefficient fields")
        return x
    if isinstance(x, int):
        return spec.integer(x)
    if isinstance(x, Fraction):
        return spec.from_fraction(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as an element of Q_{spec.q}")


def _make(spec: FieldSpec, v: int, w: int, window: int) -> PadicNumber:
    """Normalize (w mod q^window) * q^v into canonical unit form.

    window counts trusted digits above q^v; a fully cancelled w becomes a
    zero certified modulo q^(v + window)."""
    if window <= 0:
        raise PrecisionExhausted("no trusted digits left after alignment")
    w %= spec.q**window
    if w == 0:
        return PadicNumber(spec, v + window, 0, 0)
    c = _ival(w, spec.q)
    if c:
        w //= spec.q**c
        v += c
        window -= c
    if window > spec.N:
        window = spec.N
        w %= spec.q**window
    return PadicNumber(spec, v, w, window)


def _add(a: PadicNumber, b: PadicNumber, strict: bool) -> PadicNumber:
    spec = a.spec
    if a.u == 0 and a.v is None:
        return b
    if b.u == 0 and b.v is None:
        return a
    if a.u == 0 and b.u == 0:
        res = PadicNumber(spec, min(a.v, b.v), 0, 0)
        return _strictness(res, strict)
    if a.u == 0 or b.u == 0:
        z, x = (a, b) if a.u == 0 else (b, a)
        if x.v >= z.v:
            return _strictness(PadicNumber(spec, z.v, 0, 0), strict)
        return _make(spec, x.v, x.u, min(x.r, z.v - x.v))
    base = min(a.v, b.v)
    window = min(a.v + a.r, b.v + b.r) - base
    w = a.u * spec.q ** (a.v - base) + b.u * spec.q ** (b.v - base)
    res = _make(spec, base, w, window)
    return _strictness(res, strict)


def _strictness(res: PadicNumber, strict: bool) -> PadicNumber:
    if strict and res.u == 0:
        raise PrecisionExhausted("precision exhausted: all trusted digits cancelled")
    return res


def _mul(a: PadicNumber, b: PadicNumber) -> PadicNumber:
    spec = a.spec
    if a.u == 0 or b.u == 0:
        if (a.u == 0 and a.v is None) or (b.u == 0 and b.v is None):
            return PadicNumber(spec, None, 0, 0)
        # vanishing bound and valuation add the same way under products
        return PadicNumber(spec, a.v + b.v, 0, 0)
    r = min(a.r, b.r)
    return PadicNumber(spec, a.v + b.v, a.u * b.u % spec.q**r, r)


def lenient_add(a: PadicNumber, b: PadicNumber) -> PadicNumber:
    """Addition that reports full cancellation as a certified zero."""
    return _add(a, _coerce(a.spec, b), strict=False)


def lenient_sub(a: PadicNumber, b: PadicNumber) -> PadicNumber:
    return _add(a, -_coerce(a.spec, b), strict=False)


def dev_val(x: PadicNumber, y) -> int | None:
    """Valuation of the first certified disagreement between x and y.

    None means every digit trusted by both sides agrees; an integer d means
    the two values provably differ at valuation d."""
    d = lenient_sub(x, y)
    if d.u == 0:
        return None
    return d.v


def shared_abs_precision(x: PadicNumber, y: PadicNumber) -> int | None:
    """Modulus exponent up to which the pair is jointly determined (None = exact)."""
    ax, ay = x.abs_precision(), y.abs_precision()
    if ax is None:
        return ay
    if ay is None:
        return ax
    return min(ax, ay)


def teichmuller(spec: FieldSpec, c) -> PadicNumber:
    """The (q-1)-th root of unity congruent to c modulo q.

    Newton iteration on x^(q-1) - 1 with a precision-doubling ladder; the
    lift only depends on the residue of c."""
    q, N = spec.q, spec.N
    if isinstance(c, PadicNumber):
        if c.u == 0 or c.v != 0:
            raise DomainError("Teichmueller lift needs a unit with a known residue")
        c0 = c.u % q
    else:
        c0 = int(c) % q
    if c0 == 0:
        raise DomainError("Teichmueller lift of a residue divisible by q")
    x, k = c0, 1
    while k < N:
        k = min(2 * k, N)
        mod = q**k
        fx = (pow(x, q - 1, mod) - 1) % mod
        dfx = (q - 1) * pow(x, q - 2, mod) % mod
        x = (x - fx * pow(dfx, -1, mod)) % mod
    return _make(spec, 0, x, N)


def smallest_primitive_root(q: int) -> int:
    """Least generator of the multiplicative group modulo the prime q."""
    if q == 2:
        return 1
    targets = [(q - 1) // ell for ell in _factorize(q - 1)]
    for g in range(2, q):
        if all(pow(g, t, q) != 1 for t in targets):
            return g
    raise DomainError(f"no primitive root modulo {q}")  # unreachable for prime q


def primitive_root_of_unity(spec: FieldSpec, order: int) -> PadicNumber:
    """A primitive root of unity of the given order in Q_q.

    Deterministic choice: the Teichmueller lift of the smallest primitive
    root of q, raised to (q-1)/order."""
    if order < 1:
        raise DomainError("root-of-unity order must be positive")
    if order == 1:
        return spec.one()
    if (spec.q - 1) % order != 0:
        raise DomainError(
            f"Q_{spec.q} has no primitive root of unity of order {order}: {order} does not divide q-1"
        )
    g = smallest_primitive_root(spec.q)
    return teichmuller(spec, g) ** ((spec.q - 1) // order)


def _sqrt_mod_prime(a: int, q: int) -> int:
    """Square root modulo an odd prime via Tonelli-Shanks; raises on non-residues."""
    a %= q
    if a == 0:
        return 0
    if pow(a, (q - 1) // 2, q) != 1:
        raise DomainError(f"not a square: residue {a} is a non-residue modulo {q}")
    if q % 4 == 3:
        return pow(a, (q + 1) // 4, q)
    s, e = q - 1, 0
    while s % 2 == 0:
        s //= 2
        e += 1
    n = 2
    while pow(n, (q - 1) // 2, q) != q - 1:
        n += 1
    x = pow(a, (s + 1) // 2, q)
    b = pow(a, s, q)
    g = pow(n, s, q)
    r = e
    while True:
        t, m = b, 0
        while t != 1:
            t = t * t % q
            m += 1
        if m == 0:
            return x
        gs = pow(g, 1 << (r - m - 1), q)
        g = gs * gs % q
        x = x * gs % q
        b = b * g % q
        r = m


def hensel_sqrt(x: PadicNumber) -> PadicNumber:
    """Square root in Q_q with a deterministic sign convention.

    The returned root has leading digit in [1, (q-1)/2] for odd q, and is
    congruent to 1 modulo 4 for q = 2 (only units that are 1 modulo 8 are
    squares there, and one trusted digit is lost in the lift)."""
    spec = x.spec
    q = spec.q
    if x.u == 0:
        if x.v is None:
            return x
        raise PrecisionExhausted("square root of a quantity with no known nonzero digit")
    if x.v % 2 != 0:
        raise DomainError("odd valuation: the square root leaves Q_q")
    if q == 2:
        if x.r < 3:
            raise PrecisionExhausted("need at least three trusted digits for a 2-adic square root")
        if x.u % 8 != 1:
            raise DomainError(
                "2-adic square roots are unsupported unless the unit is 1 modulo 8; use an odd q"
            )
        y, k = 1, 3
        while k < x.r:
            if (y * y - x.u) % (1 << (k + 1)) != 0:
                y += 1 << (k - 1)
            k += 1
        y %= 1 << (x.r - 1)
        if y % 4 == 3:
            y = (1 << (x.r - 1)) - y
        return _make(spec, x.v // 2, y, x.r - 1)
    y = _sqrt_mod_prime(x.u, q)
    k = 1
    while k < x.r:
        k = min(2 * k, x.r)
        mod = q**k
        y = (y + x.u * pow(y, -1, mod)) * pow(2, -1, mod) % mod
    if y % q > (q - 1) // 2:
        y = q**x.r - y
    return _make(spec, x.v // 2, y, x.r)
