"""Potentials ``V = poly(x) - a*log(x**2)`` with exact derivatives."""

from __future__ import annotations

import json
import math
import threading
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .algebra import (
    ALL_REALS,
    PUNCTURED,
    Polynomial,
    PositivityCertificate,
    RationalFunction,
    as_fraction,
    rf_positive_on,
)


class PotentialError(ValueError):
    pass


class Potential:
    """A potential with rational-function derivative.

    Build these with :func:`make_potential` (validated) or
    :meth:`Potential.symbolic` (coefficients in a symbolic field, no
    validation, derivatives only).
    """

    def __init__(self, poly: Polynomial, log_coeff=Fraction(0), name: Optional[str] = None):
        self.poly = poly
        self.log_coeff = log_coeff
        self.name = name
        self._derivs: dict[int, RationalFunction] = {}
        self._norm_lock = threading.Lock()
        self._norm: dict[float, object] = {}

    @classmethod
    def symbolic(cls, poly_coeffs: Sequence, log_coeff=0, name: Optional[str] = None) -> "Potential":
        return cls(Polynomial(poly_coeffs), log_coeff, name)

    @property
    def domain(self) -> str:
        return PUNCTURED if self.log_coeff != 0 else ALL_REALS

    def __repr__(self) -> str:
        label = f"{self.name}: " if self.name else ""
        return f"<Potential {label}V = {self.describe()}>"

    def describe(self) -> str:
        text = str(self.poly)
        if self.log_coeff != 0:
            text += f" - ({self.log_coeff})*log(x^2)"
        return text

    def to_json(self) -> dict:
        out = {"poly": self.poly.to_json(), "log_coeff": str(self.log_coeff)}
        if self.name:
            out["name"] = self.name
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Potential):
            return NotImplemented
        return self.poly == other.poly and self.log_coeff == other.log_coeff

    def __hash__(self) -> int:
        return hash((self.poly, self.log_coeff))

    def cached_normalizer(self, key: float, compute):
        """Once-only memo for the normalizing constant at tolerance ``key``."""
        with self._norm_lock:
            if key not in self._norm:
                self._norm[key] = compute()
            return self._norm[key]


def make_potential(poly_coeffs: Sequence, log_coeff=0, name: Optional[str] = None) -> Potential:
    poly = Polynomial(as_fraction(c) for c in poly_coeffs)
    a = as_fraction(log_coeff)
    if a < 0:
        raise PotentialError("unsupported potential class: log coefficient must be >= 0")
    if poly.degree < 2 or poly.degree % 2 or poly.lc <= 0:
        raise PotentialError("measure not finite: polynomial part must have even degree >= 2 "
                             "and a positive leading coefficient")
    return Potential(poly, a, name)


def potential_from_json(data) -> Potential:
    """Parse ``{"poly": ["0","0","1/2"], "log_coeff": "0"}``."""
    if isinstance(data, (str, Path)):
        text = str(data)
        path = Path(text)
        data = json.loads(path.read_text() if not text.lstrip().startswith("{") and path.exists() else text)
    if not isinstance(data, dict) or "poly" not in data:
        raise PotentialError("potential config needs a 'poly' key")
    for c in list(data["poly"]) + [data.get("log_coeff", "0")]:
        if isinstance(c, float):
            raise PotentialError(f"float {c!r} in potential config; use exact strings like '1/2'")
    return make_potential(data["poly"], data.get("log_coeff", "0"), data.get("name"))


def d_v(pot: Potential, k: int) -> RationalFunction:
    """Exact k-th derivative of V.

    The log term contributes ``-2a * (-1)**(k-1) * (k-1)! / x**k``.
    """
    if k < 1:
        raise ValueError("derivative order must be >= 1")
    cached = pot._derivs.get(k)
    if cached is not None:
        return cached
    r = RationalFunction(pot.poly.derivative(k))
    a = pot.log_coeff
    if a != 0:
        c = -2 * a * (-1) ** (k - 1) * math.factorial(k - 1)
        r = r + RationalFunction(Polynomial([c]), Polynomial.monomial(k))
    pot._derivs[k] = r
    return r


def convexity_check(pot: Potential) -> PositivityCertificate:
    return rf_positive_on(d_v(pot, 2), pot.domain)


def log_weight(pot: Potential, x):
    """``-V(x)`` without the normalizing constant; ``-inf`` at a zero of the weight."""
    xa = np.asarray(x, dtype=float)
    a = float(pot.log_coeff)
    out = -pot.poly.eval_float(xa)
    if a != 0:
        with np.errstate(divide="ignore"):
            out = out + a * np.log(xa * xa)
    if np.ndim(x) == 0:
        return float(out)
    return out


def gaussian() -> Potential:
    return make_potential(["0", "0", "1/2"], name="gaussian")
