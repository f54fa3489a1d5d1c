"""Integrals against ``exp(-V)``, variances, and the Gaussian Hermite oracle."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    PUNCTURED,
    Polynomial,
    RationalFunction,
    sturm_real_roots,
)
from .potential import Potential

DEFAULT_TOL = 1e-8
DEFAULT_ABS_TOL = 1e-10
EPS = float(np.finfo(float).eps)
# a few ulps of Horner error per node, relative to the integral of |integrand|
ROUNDING = 64 * EPS

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


class NonIntegrableError(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    panels: int
    converged: bool

    def scaled(self, z: "QuadratureResult") -> "QuadratureResult":
        """This integral divided by the normalizer ``z``, errors propagated."""
        v = self.value / z.value
        err = self.abs_error_estimate / z.value + abs(v) * z.abs_error_estimate / z.value
        return QuadratureResult(v, err, self.panels, self.converged and z.converged)

    def to_json(self) -> dict:
        return {"value": self.value, "err": self.abs_error_estimate}


def _gk15(h: Callable, a: float, b: float):
    c, r = 0.5 * (a + b), 0.5 * (b - a)
    y = h(c + r * _NODES)
    k = r * float(np.dot(_KW, y))
    g = r * float(np.dot(_GW, y))
    return k, abs(k - g), r * float(np.dot(_KW, np.abs(y)))


def adaptive_gk(h: Callable, a: float, b: float, target: Callable[[float], float],
                max_panels: int = 4000, initial: int = 8):
    """Global adaptive Gauss-Kronrod on ``[a, b]``.

    ``target(value)`` gives the acceptable absolute error for the current
    estimate.  Returns ``(value, err, abs_integral, panels, converged)``.
    """
    edges = np.linspace(a, b, initial + 1)
    heap = []
    for i in range(initial):
        lo, hi = float(edges[i]), float(edges[i + 1])
        k, e, m = _gk15(h, lo, hi)
        heapq.heappush(heap, (-e, lo, hi, k, m))
    while True:
        value = math.fsum(p[3] for p in heap)
        err = math.fsum(-p[0] for p in heap)
        floor = ROUNDING * math.fsum(p[4] for p in heap)
        if err <= max(target(value), floor) or len(heap) >= max_panels:
            break
        e, lo, hi, _, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            heapq.heappush(heap, (e, lo, hi, _, _))
            break
        for l2, h2 in ((lo, mid), (mid, hi)):
            k, e2, m = _gk15(h, l2, h2)
            heapq.heappush(heap, (-e2, l2, h2, k, m))
    panels = sorted(heap, key=lambda p: p[1])
    value = math.fsum(p[3] for p in panels)
    err = math.fsum(-p[0] for p in panels)
    absint = math.fsum(p[4] for p in panels)
    return value, err, absint, len(panels), err <= max(target(value), ROUNDING * absint)


def tanh_sinh_origin(logh: Callable, sgn: Callable, c: float, target: Callable[[float], float],
                     max_level: int = 10):
    """Tanh-sinh on ``[0, c]`` for integrands with an algebraic singularity at 0.

    The integrand is supplied as ``sgn(x) * exp(logh(x, log x))`` so that
    factors like ``x**p`` are formed in log space and never overflow.
    """
    prev = None
    for level in range(3, max_level + 1):
        step = 2.0 ** -level
        t = np.arange(-6.5, 6.5 + step / 2, step)
        u = math.pi * np.sinh(t)
        # x = c / (1 + exp(-u)), written to keep small x and c - x accurate
        logx = math.log(c) - np.logaddexp(0.0, -u)
        x = np.exp(logx)
        logw = math.log(c * math.pi) + np.log(np.cosh(t)) - u - 2 * np.logaddexp(0.0, -u)
        keep = x > 0
        vals = sgn(x[keep]) * np.exp(logh(x[keep], logx[keep]) + logw[keep])
        cur = step * math.fsum(vals)
        if prev is not None:
            err = abs(cur - prev)
            absint = step * math.fsum(np.abs(vals))
            ok = err <= max(target(cur), ROUNDING * absint)
            if ok or level == max_level:
                return cur, err, absint, len(t), ok
        prev = cur
    raise AssertionError("unreachable")


def _tail_radius(logh: Callable, sign: int, floor: float) -> float:
    """Radius beyond which the log-integrand stays below ``floor``."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        xmax = 2.0
        while xmax < 1e6:
            probe = sign * xmax * np.array([1.0, 1.1, 1.2])
            if np.all(logh(probe) < floor - 40.0):
                break
            xmax *= 1.25
        grid = np.linspace(0.0, xmax, 4001)[1:] * sign
        lv = logh(grid)
    above = np.nonzero(np.isfinite(lv) & (lv > floor))[0]
    if len(above) == 0:
        return float(abs(grid[0]))
    i = min(above[-1] + 2, len(grid) - 1)
    return float(abs(grid[i]))


def integrate_rf(r: RationalFunction, pot: Potential, tol: float = DEFAULT_TOL,
                 abs_tol: float = DEFAULT_ABS_TOL, max_panels: int = 4000) -> QuadratureResult:
    """Unnormalized ``int r(x) exp(-V(x)) dx`` over the potential's domain."""
    if tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    if r.is_zero():
        return QuadratureResult(0.0, 0.0, 0, True)

    a = pot.log_coeff
    den = r.den
    if pot.domain == PUNCTURED:
        den = den.shift_down(den.valuation())
    if den.degree > 0 and sturm_real_roots(den) > 0:
        raise ZeroDivisionError("pole of the integrand on the integration path")

    # factor out x**m at the origin so the rest is finite there
    m = r.x_order() if a != 0 else 0
    power = m + 2 * a
    if a != 0 and power <= -1:
        raise NonIntegrableError(
            f"non-integrable term: integrand behaves like |x|^({power}) at 0")
    num, dn = r.num, r.den
    if a != 0:
        num, dn = num.shift_down(num.valuation()), dn.shift_down(dn.valuation())
    nc, ns = _scaled_coeffs(num)
    dc, ds = _scaled_coeffs(dn)
    pc = pot.poly.float_coeffs()
    pw = float(power)
    odd = (m % 2 == 1)

    def core(x):
        return np.ldexp(np.polyval(nc[::-1], x) / np.polyval(dc[::-1], x), ns - ds)

    def logh(x, logx=None):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            lv = np.log(np.abs(core(x))) - np.polyval(pc[::-1], x)
            if a != 0:
                lx = np.log(np.abs(x)) if logx is None else logx
                lv = lv + pw * lx
        return lv

    def h(x):
        x = np.asarray(x, dtype=float)
        v = core(x) * np.exp(-np.polyval(pc[::-1], x))
        if a != 0:
            v = v * np.exp(pw * np.log(np.abs(x)))
            if odd:
                v = v * np.sign(x)
        return v

    # tail cut: integrand below abs_tol * 1e-6 (relative to a unit-scale answer)
    floor = math.log(abs_tol) - 14.0
    r_pos = _tail_radius(logh, 1, floor)
    r_neg = _tail_radius(logh, -1, floor)
    tail = _tail_bound(logh, r_pos) + _tail_bound(logh, -r_neg)

    def target(v):
        return max(abs_tol, tol * abs(v))

    pieces = []
    if a == 0:
        v, e, s, n, ok = adaptive_gk(h, -r_neg, r_pos, lambda v: 0.5 * target(v), max_panels)
        pieces.append((v, e, s, n, ok))
    else:
        for sgn_side, R in ((1, r_pos), (-1, r_neg)):
            c = min(1.0, 0.5 * R)
            sign_of = (lambda x, s=sgn_side: np.full_like(x, float(s ** m)) * np.sign(core(s * x)))
            ts = tanh_sinh_origin(lambda x, lx, s=sgn_side: logh(s * x, lx), sign_of, c,
                                  lambda v: 0.25 * target(v))
            pieces.append(ts)
            if R > c:
                lo, hi = (c, R) if sgn_side > 0 else (-R, -c)
                pieces.append(adaptive_gk(h, lo, hi, lambda v: 0.25 * target(v), max_panels))
    value = math.fsum(p[0] for p in pieces)
    err = math.fsum(p[1] for p in pieces) + tail
    absint = math.fsum(p[2] for p in pieces)
    round_floor = ROUNDING * absint
    err = max(err, round_floor)
    panels = sum(p[3] for p in pieces)
    converged = err <= max(target(value), round_floor)
    return QuadratureResult(float(value), float(err), int(panels), bool(converged))


def _tail_bound(logh: Callable, R: float) -> float:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lv = float(logh(np.array([R]))[0])
    return math.exp(lv) if np.isfinite(lv) else 0.0


def _scaled_coeffs(p: Polynomial):
    """Float coefficients of ``p`` scaled by ``2**-s``, with ``s``, to dodge overflow."""
    if p.is_zero():
        return np.zeros(1), 0
    bits = max(_log2(c) for c in p.coeffs if c != 0)
    s = int(bits) - 500 if bits > 900 else 0
    scale = Fraction(2) ** s
    return np.array([float(c / scale) for c in p.coeffs]), s


def _log2(c: Fraction) -> float:
    c = abs(c)
    return c.numerator.bit_length() - c.denominator.bit_length()


def normalizer(pot: Potential, tol: float = DEFAULT_TOL, abs_tol: float = DEFAULT_ABS_TOL) -> QuadratureResult:
    """``Z = int exp(-V) dx``, computed once per (potential, tolerance)."""
    return pot.cached_normalizer(
        (tol, abs_tol), lambda: integrate_rf(RationalFunction(1), pot, tol, abs_tol))


def expectation(r: RationalFunction, pot: Potential, tol: float = DEFAULT_TOL,
                abs_tol: float = DEFAULT_ABS_TOL) -> QuadratureResult:
    return integrate_rf(r, pot, tol, abs_tol).scaled(normalizer(pot, tol, abs_tol))


def variance_estimate(f: Polynomial, pot: Potential, tol: float = DEFAULT_TOL,
                      abs_tol: float = DEFAULT_ABS_TOL) -> QuadratureResult:
    """Two-pass variance: the mean first, then the second moment of ``f - mean``."""
    mean = expectation(RationalFunction(f), pot, tol, abs_tol)
    centered = f - Fraction(mean.value)
    second = expectation(RationalFunction(centered * centered), pot, tol, abs_tol)
    # shifting by a slightly wrong mean adds (error)^2, negligible; keep the term anyway
    err = second.abs_error_estimate + mean.abs_error_estimate ** 2
    return QuadratureResult(second.value, err, second.panels + mean.panels,
                            second.converged and mean.converged)


def variance_direct(f: Polynomial, pot: Potential, tol: float = DEFAULT_TOL,
                    abs_tol: float = DEFAULT_ABS_TOL) -> float:
    return variance_estimate(f, pot, tol, abs_tol).value


# ---------------------------------------------------------------------------
# Gaussian oracle: probabilists' Hermite expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HermiteCoeffs:
    exact: tuple

    @property
    def coeffs(self) -> list[float]:
        return [float(c) for c in self.exact]

    def reconstruct(self) -> Polynomial:
        total = Polynomial()
        for k, c in enumerate(self.exact):
            total = total + hermite(k) * c
        return total


def hermite(k: int) -> Polynomial:
    """Probabilists' Hermite polynomial He_k (He_{k+1} = x He_k - k He_{k-1})."""
    prev, cur = Polynomial([1]), Polynomial.x()
    if k == 0:
        return prev
    for j in range(1, k):
        prev, cur = cur, Polynomial.x() * cur - prev * j
    return cur


def gaussian_hermite_transform(p: Polynomial) -> HermiteCoeffs:
    coeffs = [Fraction(0)] * (p.degree + 1)
    rest = p
    while not rest.is_zero():
        d = rest.degree
        coeffs[d] = rest.lc
        rest = rest - hermite(d) * rest.lc
    return HermiteCoeffs(tuple(coeffs))


def gaussian_norm_sq(p: Polynomial) -> Fraction:
    """Exact ``E[p(X)^2]`` for standard normal X (``||He_k||^2 = k!``)."""
    c = gaussian_hermite_transform(p).exact
    return sum((ck * ck * math.factorial(k) for k, ck in enumerate(c)), Fraction(0))


def gaussian_resolvent(g: HermiteCoeffs, n: int) -> float:
    """``<(n + L)^{-1} g, g>`` under the standard Gaussian: ``sum c_k^2 k! / (n + k)``."""
    if n < 1:
        raise ValueError("resolvent shift must be >= 1")
    total = sum((c * c * math.factorial(k) / (n + k) for k, c in enumerate(g.exact)), Fraction(0))
    return float(total)
