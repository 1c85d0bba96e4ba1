"""Whittaker-type groups: elliptic generators, their free kernel, and disks.

The configuration supplies s+1 elliptic matrices sigma_0..sigma_s of
projective order p.  The free subgroup of rank g = s(p-1) is generated by

    xi_{j,i} = sigma_0^(i-1) sigma_j sigma_0^(-i),   j = 1..s, i = 1..p-1,

and arbitrary kernel words in the sigmas are rewritten to this basis by a
coset-tracking scan (the cyclic quotient has the powers of sigma_0 as coset
representatives).  Nothing about the input matrices is trusted: projective
orders, determinant normalization, and the ping-pong disk test are all
verified at build time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError, GroupError
from .field import (
    FieldSpec,
    PadicNumber,
    dev_val,
    lenient_add,
    lenient_sub,
    primitive_root_of_unity,
)
from .moebius import INFINITY, P1Point, ProjectiveMatrix, points_agree

Word = tuple[int, ...]  # signed 1-based basis letters, freely reduced
SigmaWord = tuple[tuple[int, int], ...]  # (generator index 0..s, exponent +-1)


def reduce_word(w) -> Word:
    out: list[int] = []
    for x in w:
        if x == 0:
            raise GroupError("letter 0 is not a valid signed generator index")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def concat_words(a: Word, b: Word) -> Word:
    return reduce_word(tuple(a) + tuple(b))


def expand_sigma_power(j: int, n: int) -> SigmaWord:
    """sigma_j^n as a sequence of single steps."""
    e = 1 if n >= 0 else -1
    return tuple((j, e) for _ in range(abs(n)))


@dataclass
class Disk:
    """Closed disk |z - center| <= q^(-rho) attached to one basis letter."""

    label: str
    center: PadicNumber
    rho: int

    def contains(self, z: P1Point) -> bool:
        if z.is_infinity:
            return False
        d = lenient_sub(z.value, self.center)
        if d.is_zero:
            return True  # indistinguishable from the center
        return d.valuation() >= self.rho


@dataclass
class PingPongReport:
    disks: list[Disk]
    separations: list[tuple[str, str, int | None]]  # valuation of center difference
    ok: bool
    failures: list[str] = field(default_factory=list)


class WhittakerGroup:
    """Validated group data: elliptic generators, free basis, shells, disks."""

    def __init__(
        self,
        spec: FieldSpec,
        sigmas: list[ProjectiveMatrix],
        fixed_pairs: list[tuple[P1Point, P1Point]],
        basis: list[ProjectiveMatrix],
        nu_exponents: list[int] | None = None,
    ):
        self.spec = spec
        self.p = spec.p
        self.sigmas = sigmas
        self.s = len(sigmas) - 1
        self.genus = self.s * (self.p - 1)
        self.fixed_pairs = fixed_pairs  # (o_j, e_j) per elliptic generator
        self.nu_exponents = nu_exponents or [
            _rotation_exponent(spec, m, o, e, f"sigma_{j}")
            for j, (m, (o, e)) in enumerate(zip(sigmas, fixed_pairs))
        ]
        self.basis = basis  # xi_1..xi_g, unimodular
        self._letters: dict[int, ProjectiveMatrix] = {}
        for k, m in enumerate(basis, start=1):
            self._letters[k] = m
            self._letters[-k] = m.inverse()
        self._shells: list[list[tuple[Word, ProjectiveMatrix]]] = [
            [((), ProjectiveMatrix.identity(spec))]
        ]

    # indexing

    def basis_index(self, j: int, i: int) -> int:
        """Flat 1-based index of xi_{j,i}."""
        if not (1 <= j <= self.s and 1 <= i <= self.p - 1):
            raise GroupError(f"no basis generator with j={j}, i={i}")
        return (j - 1) * (self.p - 1) + i

    def basis_position(self, k: int) -> tuple[int, int]:
        k = abs(k)
        if not 1 <= k <= self.genus:
            raise GroupError(f"basis index {k} out of range 1..{self.genus}")
        return (k - 1) // (self.p - 1) + 1, (k - 1) % (self.p - 1) + 1

    def letter_matrix(self, k: int) -> ProjectiveMatrix:
        if k not in self._letters:
            raise GroupError(f"basis index {k} out of range 1..{self.genus}")
        return self._letters[k]

    def word_matrix(self, w: Word) -> ProjectiveMatrix:
        out = ProjectiveMatrix.identity(self.spec)
        for x in w:
            out = out * self.letter_matrix(x)
        return out

    def sigma_word_matrix(self, sw: SigmaWord) -> ProjectiveMatrix:
        out = ProjectiveMatrix.identity(self.spec)
        for j, e in sw:
            m = self.sigmas[j]
            out = out * (m if e == 1 else m.inverse())
        return out

    # Schreier rewriting to the free basis

    def rewrite(self, sigma_word) -> Word:
        """Rewrite a kernel word in the elliptic generators to basis letters.

        Tracks the coset power k of sigma_0; a word that ends in a nonzero
        coset is not in the kernel and is rejected."""
        out: list[int] = []
        k = 0
        p = self.p
        for j, e in sigma_word:
            if not 0 <= j <= self.s:
                raise GroupError(f"generator index {j} out of range 0..{self.s}")
            if e not in (1, -1):
                raise GroupError("expand powers into single steps first")
            if j == 0:
                k = (k + e) % p
                continue
            if e == 1:
                i = k + 1
                if i == p:
                    # xi_{j,p} is the inverse of the ascending product
                    out.extend(-self.basis_index(j, t) for t in range(p - 1, 0, -1))
                else:
                    out.append(self.basis_index(j, i))
                k = (k + 1) % p
            else:
                if k == 0:
                    out.extend(self.basis_index(j, t) for t in range(1, p))
                else:
                    out.append(-self.basis_index(j, k))
                k = (k - 1) % p
        if k != 0:
            raise GroupError("word is not in the kernel of the cyclic quotient")
        return reduce_word(out)

    def basis_sigma_word(self, j: int, i: int) -> SigmaWord:
        """xi_{j,i} spelled in the elliptic generators."""
        return expand_sigma_power(0, i - 1) + ((j, 1),) + expand_sigma_power(0, -i)

    def exponent_vector(self, w: Word) -> list[int]:
        v = [0] * self.genus
        for x in w:
            v[abs(x) - 1] += 1 if x > 0 else -1
        return v

    def basis_name(self, k: int) -> str:
        """Display name of a basis letter: x{j}_{i}, flattened to x{j} when
        the second index is forced (p = 2)."""
        j, i = self.basis_position(k)
        return f"x{j}" if self.p == 2 else f"x{j}_{i}"

    def render_word(self, w: Word) -> str:
        if not w:
            return "1"
        return " ".join(
            self.basis_name(x) + ("" if x > 0 else "^-1") for x in w
        )

    def parse_word(self, text: str) -> Word:
        """Inverse of render_word; accepts both the flat and indexed names."""
        if text.strip() in ("", "1"):
            return ()
        letters = []
        for tok in text.split():
            body, neg = (tok[:-3], True) if tok.endswith("^-1") else (tok, False)
            if not body.startswith("x"):
                raise GroupError(f"unrecognized word letter {tok!r}")
            try:
                if "_" in body:
                    j_str, i_str = body[1:].split("_", 1)
                    k = self.basis_index(int(j_str), int(i_str))
                else:
                    k = int(body[1:])
                    self.basis_position(k)
            except ValueError:
                raise GroupError(f"unrecognized word letter {tok!r}") from None
            letters.append(-k if neg else k)
        return reduce_word(letters)

    def norm_conjugation_exponent_sums(self) -> list[list[int]]:
        """For each basis generator, the summed exponent vector of its full
        cycle of sigma_0-conjugates; the rewriting is consistent only if
        every one of these vanishes."""
        sums = []
        for k in range(1, self.genus + 1):
            j, i = self.basis_position(k)
            base = self.basis_sigma_word(j, i)
            total = [0] * self.genus
            for c in range(self.p):
                conj = expand_sigma_power(0, c) + base + expand_sigma_power(0, -c)
                for pos, val in enumerate(self.exponent_vector(self.rewrite(conj))):
                    total[pos] += val
            sums.append(total)
        return sums

    # shells of reduced words

    def shell(self, ell: int) -> list[tuple[Word, ProjectiveMatrix]]:
        """All freely reduced words of length exactly ell with their matrices."""
        while len(self._shells) <= ell:
            prev = self._shells[-1]
            nxt = []
            if len(self._shells) == 1:
                for t in self._letters:
                    nxt.append(((t,), self.letter_matrix(t)))
            else:
                for w, m in prev:
                    last = w[-1]
                    for t in self._letters:
                        if t != -last:
                            nxt.append((w + (t,), m * self.letter_matrix(t)))
            self._shells.append(nxt)
        return self._shells[ell]

    def expected_shell_size(self, ell: int) -> int:
        n = 2 * self.genus
        return 1 if ell == 0 else n * (n - 1) ** (ell - 1)

    # disks and ping-pong

    def disk_of(self, m: ProjectiveMatrix, label: str) -> Disk:
        """Isometric disk of a unimodular matrix: center -m11/m10, radius
        exponent -v(m10).  The matrix maps the exterior of its disk onto the
        interior of the disk of its inverse."""
        if not m.unimodular:
            raise GroupError(f"cannot normalize {label}: disks need determinant one")
        if m.m10.is_zero:
            raise GroupError(
                f"infinity is inside an isometric disk of {label}: re-normalize the configuration"
            )
        center = -m.m11 / m.m10
        return Disk(label=label, center=center, rho=-m.m10.valuation())

    def disks(self) -> list[Disk]:
        out = []
        for k in range(1, self.genus + 1):
            out.append(self.disk_of(self.letter_matrix(k), f"xi_{k}"))
            out.append(self.disk_of(self.letter_matrix(-k), f"xi_{k}^-1"))
        return out

    def ping_pong_check(self) -> PingPongReport:
        """Pairwise disjointness of the 2g closed isometric disks.

        Two closed disks with radius exponents r1, r2 are disjoint exactly
        when the valuation of the center difference is below min(r1, r2)."""
        disks = self.disks()
        seps: list[tuple[str, str, int | None]] = []
        failures: list[str] = []
        for idx in range(len(disks)):
            for jdx in range(idx + 1, len(disks)):
                a, b = disks[idx], disks[jdx]
                d = lenient_sub(a.center, b.center)
                val = None if d.is_zero else d.valuation()
                seps.append((a.label, b.label, val))
                bound = min(a.rho, b.rho)
                if val is None or val >= bound:
                    failures.append(
                        f"disks {a.label} and {b.label} overlap: "
                        f"center separation valuation {val} reaches {bound}"
                    )
        return PingPongReport(disks=disks, separations=seps, ok=not failures, failures=failures)


def _order_fixed_points(
    m: ProjectiveMatrix, hint: tuple | None, spec: FieldSpec, label: str
) -> tuple[P1Point, P1Point]:
    """Fixed points in the square-root sign order, or in the order pinned by
    an explicit configuration hint.

    The hint selects whichever fixed point it is q-adically closest to, so a
    truncated rational stand-in works even when the exact points live in a
    ramified-looking description (square roots computed numerically).  An
    equidistant hint is rejected as ambiguous."""
    zp, zm = m.fixed_points()
    if hint is None:
        return zp, zm
    first = _hint_point(spec, hint)
    if first.is_infinity or zp.is_infinity or zm.is_infinity:
        if points_agree(first, zp):
            return zp, zm
        if points_agree(first, zm):
            return zm, zp
        raise ConfigError(f"fixed-point hint for {label} matches neither fixed point")
    dp = dev_val(first.value, zp.value)
    dm = dev_val(first.value, zm.value)
    if dp is None or (dm is not None and dp > dm):
        return zp, zm
    if dm is None or dm > dp:
        return zm, zp
    raise ConfigError(
        f"fixed-point hint for {label} is equidistant from both fixed points"
    )


def _hint_point(spec: FieldSpec, hint) -> P1Point:
    if hint is None or (isinstance(hint, str) and hint in ("inf", "oo")):
        return INFINITY
    if isinstance(hint, (list, tuple)):
        num, den = hint
        return P1Point(spec.rational(num, den))
    return P1Point(spec.rational(int(hint)))


def _rotation_exponent(
    spec: FieldSpec, m: ProjectiveMatrix, o: P1Point, e: P1Point, label: str
) -> int:
    """The exponent nu in 1..p-1 such that conjugating m by the map sending
    (o, e) to (0, infinity) yields diag(zeta^nu, 1) projectively.

    Computed through the eigenvalue attached to each fixed point (m10*z + m11,
    or m00 for the point at infinity): conjugating literally would scale the
    result by the determinant of the moving map, which for close fixed points
    costs digits we cannot spare."""

    def eigenvalue(z: P1Point) -> PadicNumber:
        if z.is_infinity:
            return m.m00
        return lenient_add(m.m10 * z.value, m.m11)

    mult = eigenvalue(e) / eigenvalue(o)
    zeta = primitive_root_of_unity(spec, spec.p)
    acc = spec.one()
    for nu in range(1, spec.p):
        acc = acc * zeta
        if dev_val(mult, acc) is None:
            return nu
    raise GroupError(f"multiplier of {label} is not a primitive root of unity of order p")


def build_whittaker_group(
    spec: FieldSpec,
    sigma_matrices: list[ProjectiveMatrix],
    det_hints: list[PadicNumber | None] | None = None,
    fixed_point_hints: list | None = None,
    require_ping_pong: bool = True,
) -> WhittakerGroup:
    """Validate elliptic generators and assemble the group data.

    Every generator must have projective order p; the free basis elements
    must normalize to determinant one (their disks are meaningless without
    that); and the disks must pass the ping-pong test unless explicitly
    deferred."""
    if len(sigma_matrices) < 2:
        raise ConfigError("need at least two elliptic generators (sigma_0 and sigma_1)")
    p = spec.p
    hints = det_hints or [None] * len(sigma_matrices)
    fp_hints = fixed_point_hints or [None] * len(sigma_matrices)
    if len(hints) != len(sigma_matrices) or len(fp_hints) != len(sigma_matrices):
        raise ConfigError("hint lists must match the number of generators")

    sigmas: list[ProjectiveMatrix] = []
    for idx, raw in enumerate(sigma_matrices):
        order = raw.projective_order(limit=2 * p + 1)
        if order != p:
            raise GroupError(
                f"generator sigma_{idx} has projective order {order}, expected {p}"
            )
        sigmas.append(raw.normalized(det_hint=hints[idx]))

    fixed_pairs = [
        _order_fixed_points(m, fp_hints[idx], spec, f"sigma_{idx}")
        for idx, m in enumerate(sigmas)
    ]

    s = len(sigmas) - 1
    basis: list[ProjectiveMatrix] = []
    for j in range(1, s + 1):
        for i in range(1, p):
            m = sigmas[0] ** (i - 1) * sigmas[j] * sigmas[0] ** (-i)
            if not m.unimodular:
                m = m.normalized()
            if not m.unimodular:
                raise GroupError(
                    f"cannot normalize basis element xi_({j},{i}) to determinant one; "
                    "extend the field or change the generators"
                )
            basis.append(m)

    group = WhittakerGroup(spec, sigmas, fixed_pairs, basis)
    for k, sums in enumerate(group.norm_conjugation_exponent_sums(), start=1):
        if any(sums):
            raise GroupError(
                f"norm relation violated for basis element {k}: "
                f"conjugate exponents sum to {sums}"
            )
    if require_ping_pong:
        report = group.ping_pong_check()
        if not report.ok:
            raise GroupError(
                "ping-pong test failed: " + "; ".join(report.failures)
            )
    return group
