"""Iterated Brascamp-Lieb refinement: the operator A and the E_n, rho_n sequences.

Notation
--------
``A(E) = (2 E'' + 2 V' E' - E'^2 / E + 4 E V'') / 4``

``E_1 = V''`` and ``E_{n+1} = E_n (1 + A(1 / E_n))`` as long as ``E_n > 0``.

The n-th variance term is ``T_n = || E_n^{-1/2} u_n ||^2`` with ``u_1 = f'``
and ``u_{n+1} = E_n^{1/2} D[u_n / E_n]``.  Square roots never enter the
computation: ``u_n = rho_n * prod_{k<n} E_k^{-1/2}`` with ``rho_n`` rational.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import (
    Polynomial,
    PositivityCertificate,
    RationalFunction,
    rf_positive_on,
)
from .potential import Potential, convexity_check, d_v

# weights of (E'', V'E', E'^2/E, E V'') inside A, before the overall 1/4
A_WEIGHTS = (2, 2, -1, 4)

COMPLETED = "completed"
POSITIVITY_FAILED = "positivity-failed"
DEPTH_REACHED = "depth-reached"


class SequenceExhausted(ValueError):
    pass


def apply_A(E: RationalFunction, pot: Potential, weights: Sequence = A_WEIGHTS) -> RationalFunction:
    if E.is_zero():
        raise ZeroDivisionError("A(E) needs E != 0")
    w1, w2, w3, w4 = weights
    dE = E.derivative()
    d2E = dE.derivative()
    total = d2E * w1 + d_v(pot, 1) * dE * w2 + (dE * dE / E) * w3 + E * d_v(pot, 2) * w4
    return total * Fraction(1, 4)


def next_E(E: RationalFunction, pot: Potential, weights: Sequence = A_WEIGHTS) -> RationalFunction:
    return E * (1 + apply_A(E.reciprocal(), pot, weights))


@dataclass
class RefinementSequence:
    potential: Potential
    E: list[RationalFunction]
    certs: list[PositivityCertificate]
    truncation: str
    failed_at: Optional[int] = None  # 1-based index of the non-positive E_n

    @property
    def positive_count(self) -> int:
        n = 0
        for c in self.certs:
            if not c.positive:
                break
            n += 1
        return n

    def to_json(self) -> dict:
        items = []
        for E, c in zip(self.E, self.certs):
            item = {**E.to_json(), "positive": c.positive}
            if c.witness is not None:
                item["witness"] = c.witness
            items.append(item)
        out = {"E": items, "truncation": self.truncation}
        if self.failed_at is not None:
            out["failed_at"] = self.failed_at
        return out


def build_sequence(pot: Potential, depth: int, *, weights: Sequence = A_WEIGHTS,
                   max_degree: Optional[int] = None) -> RefinementSequence:
    """Iterate ``next_E`` from ``E_1 = V''`` with a Sturm certificate per step.

    Stops at ``depth`` or at the first non-positive element, which is kept
    along with its failing certificate.  ``max_degree`` caps the size of the
    numerator; hitting it ends the run with truncation ``depth-reached``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    conv = convexity_check(pot)
    if not conv.positive:
        raise ValueError(f"potential is not convex on {pot.domain} (V'' <= 0 near x = {conv.witness})")
    E = [d_v(pot, 2)]
    certs = [conv]
    while len(E) < depth:
        # degrees roughly triple per step; refuse before paying for it
        if max_degree is not None and 3 * max(E[-1].num.degree, E[-1].den.degree) > max_degree:
            return RefinementSequence(pot, E, certs, DEPTH_REACHED)
        nxt = next_E(E[-1], pot, weights)
        if max_degree is not None and max(nxt.num.degree, nxt.den.degree) > max_degree:
            return RefinementSequence(pot, E, certs, DEPTH_REACHED)
        cert = rf_positive_on(nxt, pot.domain)
        E.append(nxt)
        certs.append(cert)
        if not cert.positive:
            return RefinementSequence(pot, E, certs, POSITIVITY_FAILED, failed_at=len(E))
    return RefinementSequence(pot, E, certs, COMPLETED)


def bl_reverse_expression(pot: Potential) -> RationalFunction:
    """``3 V3^2 + 8 V2^3 - 2 V4 V2 - 2 V3 V2 V1``, which has the sign of 1 + A(1/V'')."""
    v1, v2, v3, v4 = (d_v(pot, k) for k in (1, 2, 3, 4))
    return v3 * v3 * 3 + v2 * v2 * v2 * 8 - v4 * v2 * 2 - v3 * v2 * v1 * 2


def bl_reverse_condition(pot: Potential) -> tuple[RationalFunction, PositivityCertificate]:
    expr = bl_reverse_expression(pot)
    return expr, rf_positive_on(expr, pot.domain)


@dataclass
class IdentityCheck:
    ok: bool
    differences: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def commutation_check(E: RationalFunction, pot: Potential, phi: Polynomial,
                      weights: Sequence = A_WEIGHTS) -> IdentityCheck:
    """Check ``D E D* = A(E) + E^{1/2} D* D E^{1/2}`` and ``D L = (L + V'') D`` on ``phi``.

    With ``G = E^{1/2}``: ``G G' = E'/2`` and ``G G'' = E''/2 - E'^2/(4E)``, so the
    right-hand side expands to integer powers of E only.
    """
    phi = RationalFunction(phi)
    v1, v2 = d_v(pot, 1), d_v(pot, 2)
    dphi = phi.derivative()
    d2phi = dphi.derivative()
    dE = E.derivative()
    d2E = dE.derivative()

    lhs = (E * (v1 * phi - dphi)).derivative()
    GG1 = dE * Fraction(1, 2)
    GG2 = d2E * Fraction(1, 2) - dE * dE / (E * 4)
    rhs = (apply_A(E, pot, weights) * phi
           - GG2 * phi - GG1 * dphi * 2 - E * d2phi
           + v1 * GG1 * phi + v1 * E * dphi)

    L = lambda g: v1 * g.derivative() - g.derivative().derivative()  # noqa: E731
    lhs2 = L(phi).derivative()
    rhs2 = L(dphi) + v2 * dphi

    diffs = {}
    if lhs != rhs:
        diffs["DED*"] = lhs - rhs
    if lhs2 != rhs2:
        diffs["DL"] = lhs2 - rhs2
    return IdentityCheck(not diffs, diffs)


@dataclass
class TermSeries:
    rho: list[RationalFunction]
    integrands: list[RationalFunction]


def rho_sequence(f: Polynomial, seq: RefinementSequence, depth: int) -> TermSeries:
    """rho_1..rho_depth and the term integrands g_n = rho_n^2 / (E_n prod_{k<n} E_k)."""
    if depth > seq.positive_count:
        raise SequenceExhausted(
            f"refinement sequence exhausted: {depth} terms requested, "
            f"{seq.positive_count} certified-positive E_n available ({seq.truncation})")
    E = seq.E
    logd = [Ek.derivative() / Ek for Ek in E[:depth]]
    rho = [RationalFunction(f.derivative())]
    for n in range(1, depth):
        rho.append(rho_step(rho[-1], logd[:n]))
    integrands = []
    prod = RationalFunction(1)
    for n in range(depth):
        integrands.append(rho[n] * rho[n] / (E[n] * prod))
        prod = prod * E[n]
    return TermSeries(rho, integrands)


def rho_step(rho_n: RationalFunction, log_derivs: Sequence[RationalFunction]) -> RationalFunction:
    """rho_{n+1} = rho_n' - rho_n (E_n'/E_n + 1/2 sum_{k<n} E_k'/E_k).

    ``log_derivs`` holds E_1'/E_1 .. E_n'/E_n; only E_1..E_n enter.
    """
    if rho_n.is_zero():
        return rho_n
    drift = log_derivs[-1]
    if len(log_derivs) > 1:
        drift = drift + _sum(log_derivs[:-1]) * Fraction(1, 2)
    return rho_n.derivative() - rho_n * drift


def _sum(items: Sequence[RationalFunction]) -> RationalFunction:
    total = items[0]
    for r in items[1:]:
        total = total + r
    return total


def term_integrand(series: TermSeries, n: int) -> RationalFunction:
    if not 1 <= n <= len(series.integrands):
        raise IndexError(f"term index {n} outside 1..{len(series.integrands)}")
    return series.integrands[n - 1]
