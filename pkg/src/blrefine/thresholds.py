"""Locate family parameters where the refinement sequence stops being positive.

Two one-parameter families are explored:

* ``quartic``: ``V = a x^2/2 + b x^4/4``, positive for ``b`` below a threshold
  that scales like ``a^2``;
* ``xlog``: ``V = x^2/2 - a log(x^2)``, positive for ``a`` above a threshold.

Every bisection probe uses an exact rational parameter and a Sturm
certificate, so the only approximation is the final bracket width.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .algebra import Polynomial, PositivityCertificate, as_fraction
from .potential import Potential, make_potential
from .refinement import POSITIVITY_FAILED, build_sequence

log = logging.getLogger(__name__)

QUARTIC = "quartic"
XLOG = "xlog"
FAMILIES = (QUARTIC, XLOG)
FLANK_REL = Fraction(1, 10**6)


class InvalidBracket(ValueError):
    pass


def quartic_potential(a, b) -> Potential:
    a, b = as_fraction(a), as_fraction(b)
    if a <= 0 or b < 0:
        raise ValueError("quartic family needs a > 0 and b >= 0")
    return make_potential([0, 0, a / 2, 0, b / 4], name=f"quartic(a={a}, b={b})")


def xlog_potential(a) -> Potential:
    a = as_fraction(a)
    if a <= 0:
        raise ValueError("log family needs a > 0")
    return make_potential([0, 0, Fraction(1, 2)], a, name=f"xlog(a={a})")


def default_bracket(family: str, n: int, a=1) -> tuple[Fraction, Fraction]:
    if family == QUARTIC:
        return Fraction(0), as_fraction(a) ** 2
    if family == XLOG:
        return (Fraction(1, 100), Fraction(1)) if n == 1 else (Fraction(1, 10), Fraction(1))
    raise ValueError(f"unknown family {family!r}")


def family_potential(family: str, param: Fraction, a=1) -> Potential:
    if family == QUARTIC:
        return quartic_potential(a, param)
    if family == XLOG:
        return xlog_potential(param)
    raise ValueError(f"unknown family {family!r}")


def probe(family: str, n: int, param: Fraction, a=1) -> tuple[bool, PositivityCertificate]:
    """Whether E_1..E_{n+1} are all positive at ``param``; certificate of the last one built."""
    seq = build_sequence(family_potential(family, param, a), n + 1)
    return seq.truncation != POSITIVITY_FAILED, seq.certs[-1]


@dataclass
class ThresholdResult:
    family: str
    n: int
    bracket: tuple[float, float]
    t_star: float
    iterations: int
    cert_below: PositivityCertificate
    cert_above: PositivityCertificate
    a: Optional[float] = None

    @property
    def normalized(self) -> float:
        """Quartic thresholds divided by a^2; xlog unchanged."""
        if self.family == QUARTIC:
            return self.t_star / self.a ** 2
        return self.t_star

    def to_json(self) -> dict:
        out = {
            "family": self.family,
            "n": self.n,
            "bracket": list(self.bracket),
            "t_star": self.t_star,
            "normalized": self.normalized,
            "iterations": self.iterations,
            "cert_below": self.cert_below.to_json(),
            "cert_above": self.cert_above.to_json(),
        }
        if self.a is not None:
            out["a"] = self.a
        return out


def positivity_threshold(family: str, n: int, bracket=None, tol: float = 1e-8, a=1) -> ThresholdResult:
    """Bisect the family parameter for the boundary of ``E_{n+1} > 0``.

    ``cert_below``/``cert_above`` are taken at ``t_star * (1 -+ 1e-6)``.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = (default_bracket(family, n, a) if bracket is None
              else tuple(_exact(v) for v in bracket))
    ok_lo, _ = probe(family, n, lo, a)
    ok_hi, _ = probe(family, n, hi, a)
    if ok_lo == ok_hi:
        raise InvalidBracket(f"invalid bracket: positivity is {ok_lo} at both ends ({lo}, {hi})")
    good, bad = (lo, hi) if ok_lo else (hi, lo)
    tol_q = Fraction(tol)
    iterations = 0
    # the flanks must sit outside the final bracket to be meaningful
    while abs(bad - good) > min(tol_q, FLANK_REL * min(abs(good), abs(bad)) / 2):
        mid = (good + bad) / 2
        try:
            ok, _ = probe(family, n, mid, a)
        except ZeroDivisionError:
            # a root sitting exactly on the probe; nudge once
            mid = mid + tol_q / 10
            ok, _ = probe(family, n, mid, a)
        if ok:
            good = mid
        else:
            bad = mid
        iterations += 1
    t_star = (good + bad) / 2
    below = t_star * (1 - FLANK_REL)
    above = t_star * (1 + FLANK_REL)
    _, cert_below = probe(family, n, below, a)
    _, cert_above = probe(family, n, above, a)
    return ThresholdResult(family, n, (float(lo), float(hi)), float(t_star), iterations,
                           cert_below, cert_above, float(as_fraction(a)) if family == QUARTIC else None)


def _exact(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(v)
    return as_fraction(v)


LOG_CUBIC = Polynomial([108, -855, 144, 272])


def a0_cubic_root(tol: float = 1e-10) -> float:
    """Root in (0, 1) of ``108 - 855 a + 144 a^2 + 272 a^3`` by exact-sign bisection."""
    lo, hi = Fraction(0), Fraction(1)
    if not (LOG_CUBIC(lo) > 0 > LOG_CUBIC(hi)):
        raise AssertionError("cubic does not change sign on (0, 1)")
    while hi - lo > Fraction(tol):
        mid = (lo + hi) / 2
        if LOG_CUBIC(mid) > 0:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def sweep(family: str, n: int, grid, a=1) -> list[dict]:
    """Positivity bit of E_{n+1} on a grid of exact parameter values."""
    rows = []
    for p in grid:
        p = _exact(p)
        ok, _ = probe(family, n, p, a)
        rows.append({"family": family, "n": n, "param": str(p), "value": float(p), "positive": int(ok)})
    return rows


def monotonicity_findings(t: dict[int, float], family: str) -> list[str]:
    """Compare consecutive thresholds against the conjectured trend; never raises."""
    findings = []
    keys = sorted(t)
    for i, j in zip(keys, keys[1:]):
        expected = t[i] >= t[j] if family == QUARTIC else t[i] <= t[j]
        if not expected:
            msg = f"{family}: threshold n={i} ({t[i]:.6g}) vs n={j} ({t[j]:.6g}) breaks the conjectured trend"
            log.warning(msg)
            findings.append(msg)
    return findings
