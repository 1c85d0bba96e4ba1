"""Truncated theta products over the free group orbit, and their automorphy.

The basic object is the product over group elements gamma of

    (z - gamma a) / (z - gamma b),

truncated to reduced words of length <= L and certified by a tail criterion:
the final shell's factors must all sit within q^-T of 1 and must not be
farther from 1 than the previous shell's.  Automorphy constants come in two
independent routes (a direct orbit product and a ratio of theta values at a
probe) that are always cross-checked against each other.

Infinity conventions, chosen so that every product is a limit of cross
ratios: a factor's numerator (z - gamma a) is replaced by 1 when gamma a is
the point at infinity, same for the denominator, and evaluation at z equal
to infinity takes every factor to the ratio of leading coefficients.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ConfigError, ConvergenceError, VerificationError
from .field import FieldSpec, PadicNumber, dev_val, lenient_sub, primitive_root_of_unity
from .moebius import INFINITY, P1Point, ProjectiveMatrix, points_agree
from .schottky import WhittakerGroup, Word


class TruncationPolicy:
    """Product truncation: word length cap and target tail valuation."""

    __slots__ = ("max_word_length", "tail_target")

    def __init__(self, max_word_length: int, tail_target: int):
        if max_word_length < 0:
            raise ConfigError("max word length must be nonnegative")
        if tail_target < 1:
            raise ConfigError("tail target must be at least 1")
        self.max_word_length = max_word_length
        self.tail_target = tail_target


@dataclass
class ThetaValue:
    value: PadicNumber
    tail_valuation: int | None  # min over the last shell of v(factor - 1)
    shells_used: int


_BIG = 10**9  # stands in for "factor is 1 to the full window" in min-tracking


def _factor_distance(factor: PadicNumber) -> int:
    d = lenient_sub(factor, factor.spec.one())
    if d.is_zero:
        return _BIG if d.v is None else d.v
    return d.valuation()


class ThetaMachine:
    """Evaluator bound to one group and one truncation policy.

    Orbits of evaluation points are cached per point and reused by every
    product; probe points are drawn from a seeded generator so that runs
    are reproducible.
    """

    def __init__(self, group: WhittakerGroup, policy: TruncationPolicy, seed: int = 0):
        self.group = group
        self.spec = group.spec
        self.policy = policy
        self.seed = seed
        self._orbits: dict[P1Point, list[list[P1Point]]] = {}
        self._probes: list[P1Point] = []

    # orbit bookkeeping

    def orbit_shell(self, x: P1Point, ell: int) -> list[P1Point]:
        shells = self._orbits.setdefault(x, [])
        while len(shells) <= ell:
            layer = self.group.shell(len(shells))
            shells.append([m.apply(x) for _, m in layer])
        return shells[ell]

    # probes

    def probes(self, count: int = 2) -> list[P1Point]:
        """Deterministic ordinary probe points: units kept at least one
        valuation unit clear of every ping-pong disk."""
        if len(self._probes) >= count:
            return self._probes[:count]
        disks = self.group.disks()
        rng = random.Random(self.seed)
        found = list(self._probes)
        seen = {p.value.u for p in found}
        while len(found) < count:
            u = rng.randrange(1, self.spec.q ** min(self.spec.N, 6))
            if u % self.spec.q == 0 or u in seen:
                continue
            z = self.spec.integer(u)
            ok = True
            for d in disks:
                sep = lenient_sub(z, d.center)
                if sep.is_zero or sep.valuation() > d.rho - 1:
                    ok = False
                    break
            if ok:
                seen.add(u)
                found.append(P1Point(z))
        self._probes = found
        return found[:count]

    # the shared shell-product loop

    def _shell_product(self, numden) -> ThetaValue:
        """Accumulate factors shell by shell under the tail criterion.

        numden(xa, xb) must return the factor's numerator and denominator
        for one orbit pair.  Denominators falling within q^-N of zero are
        poles; numerators there make the whole product a certified zero."""
        spec = self.spec
        L = self.policy.max_word_length
        T = self.policy.tail_target
        value = spec.one()
        prev_min: int | None = None
        last_min: int | None = None
        for ell in range(L + 1):
            shell_vals = []
            for num, den in numden(ell):
                if den.is_zero or den.valuation() > spec.N:
                    raise ConvergenceError(
                        "pole proximity: denominator within q^-N of zero"
                    )
                factor = num / den if not num.is_zero else num * den.inverse()
                shell_vals.append(factor)
            for f in shell_vals:
                value = value * f
            if ell == 0:
                continue
            m_ell = min(
                (_factor_distance(f) for f in shell_vals if not f.is_zero),
                default=_BIG,
            )
            prev_min, last_min = last_min, m_ell
            if ell >= 2 and m_ell >= T and prev_min is not None and m_ell >= prev_min:
                return ThetaValue(
                    value, None if m_ell >= _BIG else m_ell, shells_used=ell + 1
                )
        raise ConvergenceError(
            f"not converged at L={L}: last shell tail valuation {last_min}, "
            f"target {T}"
        )

    # theta products

    def theta(self, a: P1Point, b: P1Point, z: P1Point) -> ThetaValue:
        if a == b:
            return ThetaValue(self.spec.one(), None, shells_used=0)

        def numden(ell):
            for xa, xb in zip(self.orbit_shell(a, ell), self.orbit_shell(b, ell)):
                yield self._linear_factor(z, xa), self._linear_factor(z, xb)

        return self._shell_product(numden)

    def _linear_factor(self, z: P1Point, x: P1Point) -> PadicNumber:
        # (z - x) with the cross-ratio limits for either argument at infinity
        if x.is_infinity:
            return self.spec.one()
        if z.is_infinity:
            # leading coefficient of the linear polynomial in z
            return self.spec.one()
        return lenient_sub(z.value, x.value)

    # automorphy constants

    def automorphy_direct(self, a: P1Point, b: P1Point, alpha: ProjectiveMatrix) -> ThetaValue:
        """Orbit-product route: factors (m00 - m10*(gamma a)) over the same
        at gamma b, for a determinant-one matrix alpha."""
        if not alpha.unimodular:
            alpha = alpha.normalized()
        q00, v10 = alpha.m00, alpha.m10

        def weight(x: P1Point) -> PadicNumber:
            if x.is_infinity:
                return -v10
            return lenient_sub(q00, v10 * x.value)

        def numden(ell):
            for xa, xb in zip(self.orbit_shell(a, ell), self.orbit_shell(b, ell)):
                yield weight(xa), weight(xb)

        return self._shell_product(numden)

    def automorphy(
        self,
        a: P1Point,
        b: P1Point,
        alpha: ProjectiveMatrix,
        in_group: bool = False,
    ) -> PadicNumber:
        """Cross-checked automorphy constant.

        Route (i) is the direct orbit product; route (ii) evaluates theta
        ratios at a probe: a literal ratio for group elements, and the
        pulled-back ratio (conjugated endpoints on the denominator side)
        for other normalizer elements.  The image point of the probe lies
        inside an isometric disk whenever alpha is a group element, where
        the product converges far more slowly, so route (ii) runs under a
        loosened tail target and the two routes are compared at the worst
        tail either one actually achieved.  Disagreement past that bound
        is an error, not a warning."""
        direct = self.automorphy_direct(a, b, alpha)
        if not alpha.unimodular:
            alpha = alpha.normalized()
        loose = ThetaMachine(
            self.group,
            TruncationPolicy(
                self.policy.max_word_length, min(self.policy.tail_target, 4)
            ),
            seed=self.seed,
        )
        loose._orbits = self._orbits  # share the cache
        if in_group:
            down_a, down_b = a, b
        else:
            inv = alpha.inverse()
            down_a, down_b = inv.apply(a), inv.apply(b)
        z0 = self._ratio_probe(alpha, avoid=(a, b, down_a, down_b))
        az0 = alpha.apply(z0)
        upstairs = loose.theta(a, b, az0)
        downstairs = loose.theta(down_a, down_b, z0)
        ratio = upstairs.value / downstairs.value
        dev = dev_val(direct.value, ratio)
        bound = min(
            self.policy.tail_target,
            *(
                t.tail_valuation
                for t in (direct, upstairs, downstairs)
                if t.tail_valuation is not None
            ),
        )
        if dev is not None and dev < bound:
            raise VerificationError(
                f"automorphy cross-check failed: product route {direct.value!r}, "
                f"ratio route {ratio!r}, deviation valuation {dev}"
            )
        return direct.value

    def _ratio_probe(self, alpha: ProjectiveMatrix, avoid=()) -> P1Point:
        # the probe must stay finite under alpha for the upstairs theta and
        # keep clear of every endpoint (each one anchors a zero or a pole)
        for z0 in self.probes(8):
            if any(points_agree(z0, x) for x in avoid):
                continue
            if not alpha.apply(z0).is_infinity:
                return z0
        # fall back to the first probe; downstream checks will complain loudly
        return self.probes(1)[0]

    # multipliers c_beta(gamma)

    def multiplier(self, beta: Word, gamma: Word) -> PadicNumber:
        """c_beta(gamma) = c_{a, beta a}(gamma), checked at two base points."""
        if not beta:
            return self.spec.one()
        g = self.group
        mb = g.word_matrix(beta)
        mg = g.word_matrix(gamma)
        p1, p2 = self.probes(2)
        first = self.automorphy(p1, P1Point(_image(mb, p1)), mg, in_group=True)
        second = self.automorphy(p2, P1Point(_image(mb, p2)), mg, in_group=True)
        dev = dev_val(first, second)
        if dev is not None and dev < self.policy.tail_target:
            raise VerificationError(
                f"multiplier depends on the base point: {first!r} vs {second!r} "
                f"(deviation valuation {dev})"
            )
        return first


def _image(m: ProjectiveMatrix, z: P1Point) -> PadicNumber:
    img = m.apply(z)
    if img.is_infinity:
        raise ConvergenceError("base point maps to infinity; choose another probe")
    return img.value


@dataclass
class IdentityCheck:
    name: str
    instances: int
    deviation_valuation: int | None  # worst (smallest) over all instances
    shells_used: int
    passed: bool


def _worse(current: int | None, new: int | None) -> int | None:
    if new is None:
        return current
    if current is None:
        return new
    return min(current, new)


def verify_lemma_suite(
    machine: ThetaMachine, probe_count: int = 2
) -> list[IdentityCheck]:
    """Numeric verification of the five transformation identities.

    All automorphy constants here come from the direct orbit product only,
    so the pullback identity is tested against independent material rather
    than against its own consequence.
    """
    g = machine.group
    spec = machine.spec
    T = machine.policy.tail_target
    zeta = primitive_root_of_unity(spec, spec.p)
    probes = machine.probes(probe_count + 2)
    zs = probes[:probe_count]
    base = probes[probe_count]
    aux = probes[probe_count + 1]
    checks: list[IdentityCheck] = []

    def record(name, dev, instances, shells):
        checks.append(
            IdentityCheck(
                name=name,
                instances=instances,
                deviation_valuation=dev,
                shells_used=shells,
                passed=dev is None or dev >= T,
            )
        )

    # pullback through a normalizer element
    dev = None
    shells = 0
    count = 0
    for sigma in g.sigmas:
        inv = sigma.inverse()
        c = machine.automorphy_direct(base, aux, sigma)
        for z in zs:
            lhs = machine.theta(base, aux, sigma.apply(z))
            rhs_theta = machine.theta(inv.apply(base), inv.apply(aux), z)
            rhs = c.value * rhs_theta.value
            dev = _worse(dev, dev_val(lhs.value, rhs))
            shells = max(shells, lhs.shells_used, c.shells_used, rhs_theta.shells_used)
            count += 1
    record("normalizer-pullback", dev, count, shells)

    # transporting a character through conjugation
    dev = None
    shells = 0
    count = 0
    for sigma in g.sigmas:
        inv = sigma.inverse()
        for k in range(1, g.genus + 1):
            xi = g.letter_matrix(k)
            lhs = machine.automorphy_direct(inv.apply(base), inv.apply(aux), xi)
            rhs = machine.automorphy_direct(base, aux, sigma * xi * inv)
            dev = _worse(dev, dev_val(lhs.value, rhs.value))
            shells = max(shells, lhs.shells_used, rhs.shells_used)
            count += 1
    record("character-transport", dev, count, shells)

    # the rotation generators act on theta with root-of-unity weight
    dev = None
    shells = 0
    count = 0
    for i, sigma in enumerate(g.sigmas):
        _, e_i = g.fixed_pairs[i]
        w = spec.one()
        for _ in range(g.nu_exponents[i]):
            w = w * zeta
        inv = sigma.inverse()
        for z in zs:
            lhs = machine.theta(base, e_i, sigma.apply(z))
            rhs_theta = machine.theta(inv.apply(base), e_i, z)
            rhs = w * rhs_theta.value
            dev = _worse(dev, dev_val(lhs.value, rhs))
            shells = max(shells, lhs.shells_used, rhs_theta.shells_used)
            count += 1
    record("rotation-multiplier", dev, count, shells)

    # conjugating the defining word of a multiplier theta
    dev = None
    shells = 0
    count = 0
    for i, sigma in enumerate(g.sigmas):
        winv = spec.one()
        for _ in range(spec.p - g.nu_exponents[i]):
            winv = winv * zeta  # zeta^(-nu) as a positive power
        inv = sigma.inverse()
        for k in range(1, g.genus + 1):
            xi = g.letter_matrix(k)
            conj = inv * xi * sigma
            for z in zs:
                lhs = machine.theta(base, P1Point(_image(xi, base)), sigma.apply(z))
                rhs_theta = machine.theta(base, P1Point(_image(conj, base)), z)
                rhs = winv * rhs_theta.value
                dev = _worse(dev, dev_val(lhs.value, rhs))
                shells = max(shells, lhs.shells_used, rhs_theta.shells_used)
                count += 1
    record("multiplier-conjugation", dev, count, shells)

    # the explicit value on a difference of rotation generators
    dev = None
    shells = 0
    count = 0
    for i in range(len(g.sigmas)):
        o_i, e_i = g.fixed_pairs[i]
        w = spec.one()
        for _ in range(g.nu_exponents[i]):
            w = w * zeta
        for j in range(len(g.sigmas)):
            if j == i:
                continue
            word = g.sigmas[i] * g.sigmas[j].inverse()
            val = machine.automorphy_direct(o_i, e_i, word)
            dev = _worse(dev, dev_val(val.value, w))
            shells = max(shells, val.shells_used)
            count += 1
    record("explicit-generator-value", dev, count, shells)

    return checks
