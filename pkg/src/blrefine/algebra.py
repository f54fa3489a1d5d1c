"""Exact univariate polynomials and rational functions.

Coefficients are :class:`fractions.Fraction` by default.  Any exact field
whose elements support ``+ - * /`` and ``== 0`` also works (for instance
sympy's ``QQ(a, b)`` field elements), which is how identities that are
symbolic in a family parameter get checked.  Sign-dependent operations
(Sturm counting, positivity) need ordered coefficients, i.e. Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

ALL_REALS = "all-reals"
PUNCTURED = "reals-minus-origin"
DOMAINS = (ALL_REALS, PUNCTURED)

Number = Union[int, Fraction]


def as_fraction(value) -> Fraction:
    """Parse an exact rational from an int, Fraction or ``"p/q"`` string.

    Floats are refused on purpose: they would silently smuggle binary
    rounding into an exact computation.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError(f"float {value!r} rejected; pass an exact string like '1/2'")
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def _coerce(c):
    if isinstance(c, (int, str)) and not isinstance(c, bool):
        return as_fraction(c)
    if isinstance(c, float):
        raise TypeError(f"float coefficient {c!r} rejected")
    return c


def _fmt(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)


def _int_form(cs: tuple):
    """``(integer numerators, common denominator)`` for Fraction tuples, else None."""
    d = 1
    for c in cs:
        if type(c) is not Fraction:
            return None
        if c.denominator != 1:
            d = d * c.denominator // math.gcd(d, c.denominator)
    return [c.numerator * (d // c.denominator) for c in cs], d


class Polynomial:
    """Dense polynomial, coefficients in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_coerce(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def _raw(cls, cs: list) -> "Polynomial":
        while cs and cs[-1] == 0:
            cs.pop()
        p = object.__new__(cls)
        p.coeffs = tuple(cs)
        return p

    @classmethod
    def x(cls) -> "Polynomial":
        return cls([0, 1])

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls([c])

    @classmethod
    def monomial(cls, degree: int, c=1) -> "Polynomial":
        return cls._raw([Fraction(0)] * degree + [_coerce(c)])

    # -- basic structure ------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def valuation(self) -> int:
        """Largest k with x**k dividing self (0 for the zero polynomial)."""
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        return 0

    def shift_down(self, k: int) -> "Polynomial":
        return Polynomial._raw(list(self.coeffs[k:]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            try:
                other = Polynomial([other])
            except TypeError:
                return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial([{', '.join(_fmt(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and c == 1:
                parts.append(f"+ {mono}")
            elif mono and c == -1:
                parts.append(f"- {mono}")
            else:
                s = _fmt(c)
                if isinstance(c, Fraction):
                    sign = "-" if c < 0 else "+"
                    s = _fmt(abs(c))
                    if c.denominator != 1 and mono:
                        s = f"({s})"
                else:
                    sign, s = "+", f"({s})"
                parts.append(f"{sign} {s}{'*' + mono if mono else ''}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    # -- arithmetic -----------------------------------------------------

    @staticmethod
    def _lift(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other])

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw([-c for c in self.coeffs])

    def __add__(self, other) -> "Polynomial":
        if isinstance(other, RationalFunction):
            return NotImplemented
        other = self._lift(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        if isinstance(other, RationalFunction):
            return NotImplemented
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._lift(other) - self

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, RationalFunction):
            return NotImplemented
        if not isinstance(other, Polynomial):
            c = _coerce(other)
            if c == 0:
                return Polynomial()
            return Polynomial._raw([a * c for a in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial()
        ia, ib = _int_form(a), _int_form(b)
        if ia is not None and ib is not None:
            (na, da), (nb, db) = ia, ib
            acc = [0] * (len(a) + len(b) - 1)
            for i, ai in enumerate(na):
                if ai:
                    for j, bj in enumerate(nb):
                        acc[i + j] += ai * bj
            d = da * db
            return Polynomial._raw([Fraction(v, d) for v in acc])
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return Polynomial._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (Polynomial, RationalFunction)):
            return RationalFunction(self) / other
        c = _coerce(other)
        if c == 0:
            raise ZeroDivisionError("division of polynomial by zero scalar")
        return Polynomial._raw([a / c for a in self.coeffs])

    def __rtruediv__(self, other):
        return RationalFunction(Polynomial([other])) / self

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        rem = list(self.coeffs)
        db = other.degree
        lcb = other.lc
        if len(rem) - 1 < db:
            return Polynomial(), self
        quot = [Fraction(0)] * (len(rem) - db)
        bc = other.coeffs
        for k in range(len(rem) - 1 - db, -1, -1):
            c = rem[k + db]
            if c == 0:
                continue
            q = c / lcb
            quot[k] = q
            for j in range(db + 1):
                rem[k + j] = rem[k + j] - q * bc[j]
        return Polynomial._raw(quot), Polynomial._raw(rem[:db] if db > 0 else [])

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return self.divmod(other)[0]

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return self.divmod(other)[1]

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lc = self.lc
        if lc == 1:
            return self
        return Polynomial._raw([c / lc for c in self.coeffs])

    def derivative(self, k: int = 1) -> "Polynomial":
        cs = list(self.coeffs)
        for _ in range(k):
            cs = [c * i for i, c in enumerate(cs)][1:]
        return Polynomial._raw(cs)

    # -- evaluation -----------------------------------------------------

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)

    def eval_float(self, x):
        """Horner evaluation in double precision; ``x`` may be an array."""
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for c in reversed(self.float_coeffs()):
            acc = acc * x + c
        return acc

    # -- serialization --------------------------------------------------

    def to_json(self) -> list[str]:
        return [_fmt(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence) -> "Polynomial":
        if not isinstance(data, (list, tuple)):
            raise ValueError("polynomial must be a JSON array of coefficient strings")
        return cls(as_fraction(c) for c in data)


_PRIME = (1 << 61) - 1


def _reduce_mod(p: Polynomial) -> Optional[list[int]]:
    out = []
    for c in p.coeffs:
        if not isinstance(c, Fraction) or c.denominator % _PRIME == 0:
            return None
        out.append(c.numerator * pow(c.denominator, -1, _PRIME) % _PRIME)
    if out[-1] == 0:
        return None
    return out


def _coprime_mod_p(p: Polynomial, q: Polynomial) -> bool:
    """True only if gcd(p, q) = 1 over Q is proven by a gcd mod a large prime.

    When the prime keeps both leading coefficients, the degree of the
    modular gcd bounds the rational one from above.
    """
    a, b = _reduce_mod(p), _reduce_mod(q)
    if a is None or b is None:
        return False
    P = _PRIME
    while len(b) > 1:
        inv = pow(b[-1], -1, P)
        db = len(b) - 1
        a = a[:]
        for k in range(len(a) - 1 - db, -1, -1):
            c = a[k + db] * inv % P
            if c:
                for j in range(db + 1):
                    a[k + j] = (a[k + j] - c * b[j]) % P
        a = a[:db]
        while a and a[-1] == 0:
            a.pop()
        if not a:
            return False
        a, b = b, a
    return True


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d, s = d // 2, s + 1
    for base in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):  # deterministic below 3.3e24
        x = pow(base, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _primes_below(n: int):
    m = n - 1
    while True:
        if _is_prime(m):
            yield m
        m -= 2 if m % 2 else 1


def _primitive_int(p: Polynomial) -> list[int]:
    lcm = 1
    for c in p.coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in p.coeffs]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return [v // g for v in ints]


def _gcd_mod(a: list[int], b: list[int], P: int) -> list[int]:
    a, b = [v % P for v in a], [v % P for v in b]
    while b and b[-1] == 0:
        b.pop()
    while b:
        inv = pow(b[-1], -1, P)
        db = len(b) - 1
        for k in range(len(a) - 1 - db, -1, -1):
            c = a[k + db] * inv % P
            if c:
                for j in range(db + 1):
                    a[k + j] = (a[k + j] - c * b[j]) % P
        a = a[:db]
        while a and a[-1] == 0:
            a.pop()
        a, b = b, a
    inv = pow(a[-1], -1, P)
    return [v * inv % P for v in a]


def _modular_gcd(p: Polynomial, q: Polynomial) -> Optional[Polynomial]:
    """Multi-modular gcd of Fraction polynomials, checked by exact division.

    Returns None if the coefficients are not Fractions.
    """
    if not all(isinstance(c, Fraction) for c in p.coeffs + q.coeffs):
        return None
    A, B = _primitive_int(p), _primitive_int(q)
    gamma = math.gcd(A[-1], B[-1])
    best_deg = None
    modulus, acc = 1, None
    for P in _primes_below(1 << 62):
        if gamma % P == 0:
            continue
        g = _gcd_mod(A, B, P)
        deg = len(g) - 1
        if deg == 0:
            return Polynomial([1])
        if best_deg is None or deg < best_deg:
            best_deg, modulus, acc = deg, 1, [0] * (deg + 1)
        elif deg > best_deg:
            continue
        g = [v * gamma % P for v in g]
        # CRT combine acc (mod modulus) with g (mod P)
        inv = pow(modulus, -1, P)
        acc = [a + modulus * ((gv - a) * inv % P) for a, gv in zip(acc, g)]
        modulus *= P
        half = modulus // 2
        cand = Polynomial([v - modulus if v > half else v for v in acc])
        if cand.degree == best_deg and (p % cand).is_zero() and (q % cand).is_zero():
            return cand.monic()
    raise AssertionError("unreachable")


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic gcd (zero iff both inputs are zero).

    Rational coefficients go through a modular algorithm; other exact
    fields use Euclid's algorithm directly.
    """
    if p.degree > 0 and q.degree > 0:
        if _coprime_mod_p(p, q):
            return Polynomial([1])
        g = _modular_gcd(p, q)
        if g is not None:
            return g
    a, b = p.monic(), q.monic()
    while b:
        a, b = b, (a % b).monic()
    return a


def squarefree_part(p: Polynomial) -> Polynomial:
    if p.degree <= 0:
        return p
    g = poly_gcd(p, p.derivative())
    return p if g.degree == 0 else p // g


class RationalFunction:
    """Canonical quotient ``num/den``: coprime, monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _canonical: bool = False):
        if not isinstance(num, Polynomial):
            num = Polynomial([num])
        if den is None:
            den = Polynomial([1])
        elif not isinstance(den, Polynomial):
            den = Polynomial([den])
        if den.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den

    # -- structure ------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            try:
                other = RationalFunction(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalFunction({self.num!r}, {self.den!r})"

    def __str__(self) -> str:
        if self.is_polynomial():
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def x_order(self) -> int:
        """Order of the zero (positive) or pole (negative) at x = 0."""
        if self.is_zero():
            raise ValueError("order of the zero function is undefined")
        return self.num.valuation() - self.den.valuation()

    # -- arithmetic -----------------------------------------------------

    @staticmethod
    def _lift(other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other, _canonical=True)
        return RationalFunction(Polynomial([other]), _canonical=True)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, _canonical=True)

    def __add__(self, other) -> "RationalFunction":
        o = self._lift(other)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalFunction":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "RationalFunction":
        return self._lift(other) - self

    def __mul__(self, other) -> "RationalFunction":
        o = self._lift(other)
        if o.is_polynomial() and o.num.is_constant():
            if o.num.is_zero():
                return RationalFunction(Polynomial(), _canonical=True)
            return RationalFunction(self.num * o.num.coeffs[0], self.den, _canonical=True)
        # cross-cancel before multiplying to keep sizes down
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n1, d2 = (self.num // g1, o.den // g1) if g1.degree > 0 else (self.num, o.den)
        n2, d1 = (o.num // g2, self.den // g2) if g2.degree > 0 else (o.num, self.den)
        num, den = n1 * n2, d1 * d2
        lc = den.lc
        if lc != 1:
            num, den = num / lc, den / lc
        return RationalFunction(num, den, _canonical=True)

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        lc = self.num.lc
        return RationalFunction(self.den / lc, self.num / lc, _canonical=True)

    def __truediv__(self, other) -> "RationalFunction":
        o = self._lift(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return self * o.reciprocal()

    def __rtruediv__(self, other) -> "RationalFunction":
        return self._lift(other) / self

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            return self.reciprocal() ** (-n)
        # powers of coprime num/den stay coprime; den stays monic
        return RationalFunction(self.num ** n, self.den ** n, _canonical=True)

    def derivative(self) -> "RationalFunction":
        n, d = self.num, self.den
        return RationalFunction(n.derivative() * d - n * d.derivative(), d * d)

    # -- evaluation -----------------------------------------------------

    def __call__(self, x):
        return rf_eval(self, x)

    def eval_float(self, x):
        """Vectorised double-precision evaluation (no pole checks)."""
        return self.num.eval_float(x) / self.den.eval_float(x)

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "RationalFunction":
        return cls(Polynomial.from_json(data["num"]), Polynomial.from_json(data["den"]))


def _canonicalize(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if num.is_zero():
        return Polynomial(), Polynomial([1])
    if den.degree > 0:
        g = poly_gcd(num, den)
        if g.degree > 0:
            num, den = num // g, den // g
    lc = den.lc
    if lc != 1:
        num, den = num / lc, den / lc
    return num, den


def normalize(num: Polynomial, den: Polynomial) -> RationalFunction:
    return RationalFunction(num, den)


def rf_arith(op: str, r1, r2) -> RationalFunction:
    r1 = RationalFunction._lift(r1)
    if op == "add":
        return r1 + r2
    if op == "sub":
        return r1 - r2
    if op == "mul":
        return r1 * r2
    if op == "div":
        return r1 / r2
    raise ValueError(f"unknown operation {op!r}")


def rf_derivative(r: RationalFunction) -> RationalFunction:
    return r.derivative()


class PoleError(ZeroDivisionError):
    def __init__(self, location):
        super().__init__(f"evaluation at a pole: x = {location}")
        self.location = location


def rf_eval(r: RationalFunction, x):
    """Evaluate ``r`` at ``x``.

    Exact for int/Fraction input.  A float input is converted exactly to a
    Fraction, evaluated exactly and rounded once, so the result is the
    correctly rounded value of ``r`` at that double.
    """
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("cannot evaluate at a non-finite point")
        return float(rf_eval(r, Fraction(x)))
    d = r.den(x)
    if d == 0:
        raise PoleError(x)
    return r.num(x) / d


# ---------------------------------------------------------------------------
# Sturm sequences and positivity certificates
# ---------------------------------------------------------------------------


def sturm_sequence(p: Polynomial) -> list[Polynomial]:
    """Sturm chain of the square-free part of ``p``.

    Members are rescaled by positive constants, which leaves every sign
    pattern (and so every root count) unchanged.
    """
    p = squarefree_part(p)
    seq = [_positive_scale(p)]
    if p.degree <= 0:
        return seq
    q = _positive_scale(p.derivative())
    while q:
        seq.append(q)
        q = _positive_scale(-(seq[-2] % seq[-1]))
    return seq


def _positive_scale(p: Polynomial) -> Polynomial:
    if p.is_zero():
        return p
    lc = p.lc
    return p / abs(lc) if lc not in (1, -1) else p


def _sign_at(p: Polynomial, x) -> int:
    if x == math.inf:
        v = p.lc
    elif x == -math.inf:
        v = p.lc if p.degree % 2 == 0 else -p.lc
    else:
        v = p(x)
    return (v > 0) - (v < 0)


def _variations(seq: Sequence[Polynomial], x) -> int:
    signs = [s for s in (_sign_at(q, x) for q in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _bound(x):
    if x in (math.inf, -math.inf):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return as_fraction(x)


def sturm_real_roots(p: Polynomial, interval=(-math.inf, math.inf), *, seq=None) -> int:
    """Number of distinct real roots of ``p`` in the half-open ``(lo, hi]``."""
    if p.is_zero():
        raise ValueError("the zero polynomial has infinitely many roots")
    lo, hi = (_bound(v) for v in interval)
    if lo >= hi:
        return 0
    seq = seq if seq is not None else sturm_sequence(p)
    return _variations(seq, lo) - _variations(seq, hi)


@dataclass(frozen=True)
class PositivityCertificate:
    positive: bool
    domain: str
    real_root_count: int
    witness: Optional[float] = None
    method: str = "sturm"

    def to_json(self) -> dict:
        out = {
            "positive": self.positive,
            "domain": self.domain,
            "real_root_count": self.real_root_count,
            "method": self.method,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _log_grid() -> list[Fraction]:
    # +-1e-3 .. +-1e3, 20 points per decade, snapped to doubles so the
    # reported float witness is exactly the point that was evaluated
    pts = [Fraction(float(10.0 ** (k / 20.0))) for k in range(-60, 61)]
    return sorted({-p for p in pts} | set(pts))


_GRID = _log_grid()


def _find_witness(sign_fn, domain: str, factors: Sequence[Polynomial]) -> Optional[Fraction]:
    """Locate a point of ``domain`` where ``sign_fn`` is <= 0."""
    candidates = ([Fraction(0)] if domain == ALL_REALS else []) + _GRID
    for x in candidates:
        if sign_fn(x) <= 0:
            return x
    # fall back on isolating a root of one of the factors by bisection
    for f in factors:
        if f.degree <= 0:
            continue
        seq = sturm_sequence(f)
        bound = 1 + max(abs(c / f.lc) for c in f.coeffs)
        lo, hi = -Fraction(bound), Fraction(bound)
        if sturm_real_roots(f, (lo, hi), seq=seq) == 0:
            continue
        for _ in range(200):
            mid = (lo + hi) / 2
            if sturm_real_roots(f, (lo, mid), seq=seq):
                hi = mid
            else:
                lo = mid
            x = Fraction(float(hi))
            if domain == PUNCTURED and x == 0:
                continue
            if sign_fn(x) <= 0:
                return x
            if hi - lo < Fraction(1, 10**30):
                break
        return Fraction(float(hi))
    return None


def poly_positive_on(p: Polynomial, domain: str = ALL_REALS) -> PositivityCertificate:
    """Certify ``p(x) > 0`` for every ``x`` in ``domain`` via Sturm's theorem."""
    return _positive_on_factors([p], domain)


def rf_positive_on(r: RationalFunction, domain: str = ALL_REALS) -> PositivityCertificate:
    """Certify that ``r`` is defined and positive throughout ``domain``.

    The sign-carrying polynomial is ``num * den``; its two coprime factors
    are Sturm-counted separately, which is cheaper than one long chain.
    """
    if r.is_zero():
        return PositivityCertificate(False, domain, 0, 0.0 if domain == ALL_REALS else 1.0)
    return _positive_on_factors([r.num, r.den], domain)


def _positive_on_factors(factors: Sequence[Polynomial], domain: str) -> PositivityCertificate:
    if domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r}")
    if any(f.is_zero() for f in factors):
        raise ValueError("positivity of the zero polynomial is undefined")

    def sign_fn(x):
        v = Fraction(1)
        for f in factors:
            v *= f(x)
        return v

    if domain == PUNCTURED:
        k = sum(f.valuation() for f in factors)
        stripped = [f.shift_down(f.valuation()) for f in factors]
        if k % 2:
            # odd power of x flips sign across the origin
            w = _find_witness(sign_fn, domain, [])
            count = sum(sturm_real_roots(f) for f in stripped if f.degree > 0)
            return PositivityCertificate(False, domain, count, float(w))
        test = stripped
    else:
        test = list(factors)

    count = sum(sturm_real_roots(f) for f in test if f.degree > 0)
    if count == 0:
        probe = Fraction(1)
        value = Fraction(1)
        for f in test:
            value *= f(probe)
        if value > 0:
            return PositivityCertificate(True, domain, 0)
    w = _find_witness(sign_fn, domain, test)
    return PositivityCertificate(False, domain, count, None if w is None else float(w))
