"""Scalar field backends: exact Gaussian rationals and floating complex.

Two backends are supported and never mixed inside one computation:

* ``"exact"`` -- :class:`QQi`, a Gaussian rational ``(a + b i) / d`` with
  arbitrary-precision integers.
* ``"float"`` -- the builtin :class:`complex`.

Plain ``int`` and :class:`fractions.Fraction` values are promoted to either
backend on demand; ``float``/``complex`` values only ever belong to the float
backend.
"""

from __future__ import annotations

import cmath
import math
import numbers
import re
from dataclasses import dataclass
from fractions import Fraction

EXACT = "exact"
FLOAT = "float"
BACKENDS = (EXACT, FLOAT)

DEFAULT_TOL = 1e-9


class BackendMismatch(TypeError):
    """Raised when exact and float scalars meet in one operation."""

    def __init__(self, msg: str = "cannot mix exact and float scalars"):
        super().__init__(msg)


class ThetaError(ValueError):
    pass


def _reduce(a: int, b: int, d: int) -> tuple[int, int, int]:
    if d < 0:
        a, b, d = -a, -b, -d
    g = math.gcd(math.gcd(a, b), d)
    if g > 1:
        a //= g
        b //= g
        d //= g
    return a, b, d


class QQi:
    """Gaussian rational number ``(a + b*i)/d`` in lowest terms."""

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        if isinstance(re, (float, complex)) or isinstance(im, (float, complex)):
            raise BackendMismatch("QQi needs rational parts, got a float")
        if isinstance(re, QQi):
            if im:
                raise TypeError("QQi(re=QQi, im=...) is ambiguous")
            self._a, self._b, self._d = re._a, re._b, re._d
            return
        re, im = Fraction(re), Fraction(im)
        d = re.denominator * im.denominator // math.gcd(re.denominator, im.denominator)
        self._a, self._b, self._d = _reduce(
            re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d
        )

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> QQi:
        obj = cls.__new__(cls)
        if d == 1:
            obj._a, obj._b, obj._d = a, b, 1
        else:
            obj._a, obj._b, obj._d = _reduce(a, b, d)
        return obj

    @property
    def real(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def imag(self) -> Fraction:
        return Fraction(self._b, self._d)

    @property
    def parts(self) -> tuple[int, int, int]:
        """Integer triple ``(a, b, d)`` with value ``(a + b i)/d``."""
        return self._a, self._b, self._d

    def conjugate(self) -> QQi:
        return QQi._raw(self._a, -self._b, self._d)

    def abs2(self) -> Fraction:
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def __abs__(self) -> float:
        return math.hypot(self._a, self._b) / self._d

    def __complex__(self) -> complex:
        return complex(self._a / self._d, self._b / self._d)

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    @staticmethod
    def _coerce(other) -> QQi:
        if isinstance(other, QQi):
            return other
        if isinstance(other, numbers.Rational):
            return QQi._raw(int(other.numerator), 0, int(other.denominator))
        if isinstance(other, numbers.Complex):
            raise BackendMismatch()
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d1, d2 = self._d, o._d
        if d1 == d2:
            return QQi._raw(self._a + o._a, self._b + o._b, d1)
        return QQi._raw(self._a * d2 + o._a * d1, self._b * d2 + o._b * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self) -> QQi:
        return QQi._raw(-self._a, -self._b, self._d)

    def __pos__(self) -> QQi:
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d1, d2 = self._d, o._d
        if d1 == d2:
            return QQi._raw(self._a - o._a, self._b - o._b, d1)
        return QQi._raw(self._a * d2 - o._a * d1, self._b * d2 - o._b * d1, d1 * d2)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a1, b1, a2, b2 = self._a, self._b, o._a, o._b
        return QQi._raw(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, self._d * o._d)

    __rmul__ = __mul__

    def inverse(self) -> QQi:
        if not self:
            raise ZeroDivisionError("QQi division by zero")
        # d / (a + bi) = d (a - bi) / (a^2 + b^2)
        n = self._a * self._a + self._b * self._b
        return QQi._raw(self._d * self._a, -self._d * self._b, n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int) -> QQi:
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        out = QQi._raw(1, 0, 1)
        for _ in range(abs(n)):
            out = out * base
        return out

    def __eq__(self, other):
        if isinstance(other, QQi):
            return self._a == other._a and self._b == other._b and self._d == other._d
        if isinstance(other, numbers.Rational):
            return self._b == 0 and Fraction(self._a, self._d) == other
        return NotImplemented

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((Fraction(self._a, self._d), Fraction(self._b, self._d)))

    def __repr__(self) -> str:
        return f"QQi({str(self)!r})"

    def __str__(self) -> str:
        return format_exact(self)


def _fmt_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_exact(s: QQi) -> str:
    """Canonical lowest-terms text ``p/q+r/s*i`` (zero parts omitted)."""
    re_, im = s.real, s.imag
    if im == 0:
        return _fmt_fraction(re_)
    if abs(im) == 1:
        im_txt = "i"
    else:
        im_txt = _fmt_fraction(abs(im)) + "*i"
    if re_ == 0:
        return ("-" if im < 0 else "") + im_txt
    return _fmt_fraction(re_) + ("-" if im < 0 else "+") + im_txt


def format_scalar(s, digits: int = 12) -> str:
    if isinstance(s, QQi):
        return format_exact(s)
    z = complex(s)
    re_ = 0.0 if abs(z.real) < 10.0 ** -digits else z.real
    im = 0.0 if abs(z.imag) < 10.0 ** -digits else z.imag
    if im == 0:
        return f"{re_:.{digits}g}"
    if re_ == 0:
        return f"{im:.{digits}g}i"
    return f"{re_:.{digits}g}{im:+.{digits}g}i"


def backend_of(s) -> str | None:
    """Backend a scalar belongs to; ``None`` for backend-neutral rationals."""
    if isinstance(s, QQi):
        return EXACT
    if isinstance(s, numbers.Rational):
        return None
    if isinstance(s, numbers.Complex):
        return FLOAT
    raise TypeError(f"not a scalar: {s!r}")


def to_backend(s, backend: str):
    """Convert ``s`` to ``backend``.  Float -> exact is refused."""
    if backend == EXACT:
        if isinstance(s, QQi):
            return s
        if isinstance(s, numbers.Rational):
            return QQi._raw(int(s.numerator), 0, int(s.denominator))
        raise BackendMismatch()
    if backend == FLOAT:
        return complex(s)
    raise ValueError(f"unknown backend {backend!r}")


def zero(backend: str):
    return QQi._raw(0, 0, 1) if backend == EXACT else 0j


def one(backend: str):
    return QQi._raw(1, 0, 1) if backend == EXACT else 1 + 0j


def conj(s):
    return s.conjugate()


def magnitude(s) -> float:
    return float(abs(s))


def is_zero(s, tol: float = DEFAULT_TOL) -> bool:
    """Exact scalars: literal zero test (``tol`` ignored).  Float: ``|s| <= tol``."""
    if isinstance(s, QQi):
        return not s
    if isinstance(s, numbers.Rational):
        return s == 0
    return abs(s) <= tol


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or ``None``."""
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def gaussian_sqrt(w: QQi) -> QQi | None:
    """A square root of ``w`` in Q(i) when one exists, else ``None``.

    Writes the root as ``p + q i`` with ``p^2 - q^2 = Re w`` and
    ``2 p q = Im w``; then ``p^2 = (Re w + |w|)/2`` must be a rational square.
    """
    u, v = w.real, w.imag
    mod = rational_sqrt(u * u + v * v)
    if mod is None:
        return None
    p = rational_sqrt((u + mod) / 2)
    q = rational_sqrt((mod - u) / 2)
    if p is None or q is None:
        return None
    if v < 0:
        q = -q
    root = QQi(p, q)
    return root if root * root == w else None


def sqrt(s, backend: str):
    """Square root in the given backend; exact returns ``None`` if not in Q(i)."""
    if backend == EXACT:
        return gaussian_sqrt(to_backend(s, EXACT))
    return cmath.sqrt(complex(s))


# ---------------------------------------------------------------------------
# theta

@dataclass(frozen=True)
class Theta:
    """The deformation parameter, nonzero, tagged with its backend."""

    value: object
    backend: str
    on_unit_circle: bool

    def __post_init__(self):
        if is_zero(self.value, 0.0):
            raise ThetaError("theta must be nonzero")

    @classmethod
    def from_value(cls, value, backend: str | None = None, tol: float = DEFAULT_TOL) -> Theta:
        if backend is None:
            backend = backend_of(value) or EXACT
        v = to_backend(value, backend)
        if is_zero(v, 0.0):
            raise ThetaError("theta must be nonzero")
        if backend == EXACT:
            unit = v.abs2() == 1
        else:
            unit = abs(abs(v) - 1.0) <= tol
        return cls(v, backend, unit)

    @property
    def inverse(self):
        return 1 / self.value

    @property
    def lam(self):
        """``theta + 1/theta``."""
        return self.value + 1 / self.value

    def is_plus_minus_one(self, tol: float = DEFAULT_TOL) -> bool:
        return is_zero(self.value - 1, tol) or is_zero(self.value + 1, tol)

    def is_plus_minus_i(self, tol: float = DEFAULT_TOL) -> bool:
        return is_zero(self.lam, tol)

    def __str__(self) -> str:
        return format_scalar(self.value)


_EXP_RE = re.compile(
    r"^exp\(\s*([+-]?)\s*i\s*\*\s*pi\s*(?:\*\s*(\d+)\s*)?(?:/\s*(\d+)\s*)?\)$"
)
_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_TERM_RE = re.compile(
    rf"""\s*(?P<sign>[+-])?\s*(?:
        (?P<unit>[ij])(?:\s*\*\s*(?P<tail>{_NUM}(?:\s*/\s*{_NUM})?))? |
        (?P<num>{_NUM}(?:\s*/\s*{_NUM})?)(?:\s*\*?\s*(?P<imag>[ij]))?
    )\s*""",
    re.VERBOSE,
)


def _parse_real(text: str, exact: bool):
    if "/" in text:
        p, q = (t.strip() for t in text.split("/"))
        if exact:
            return Fraction(p) / Fraction(q)
        return float(p) / float(q)
    return Fraction(text) if exact else float(text)


def parse_complex(text: str, exact: bool):
    """Parse ``"a/b+c/d*i"`` / ``"x+yi"`` forms into a (re, im) pair.

    ``exact=True`` keeps rationals (decimals are read exactly), otherwise floats.
    Raises ``ValueError`` on malformed input.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty number")
    pos = 0
    re_ = im = Fraction(0) if exact else 0.0
    first = True
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse number {text!r} at column {pos + 1}")
        if not first and m.group("sign") is None:
            raise ValueError(f"cannot parse number {text!r} at column {pos + 1}")
        sign = -1 if m.group("sign") == "-" else 1
        if m.group("unit"):
            val = _parse_real(m.group("tail"), exact) if m.group("tail") else (Fraction(1) if exact else 1.0)
            im += sign * val
        else:
            val = _parse_real(m.group("num"), exact)
            if m.group("imag"):
                im += sign * val
            else:
                re_ += sign * val
        pos = m.end()
        first = False
    return re_, im


def parse_theta(text: str, backend: str = EXACT, tol: float = DEFAULT_TOL) -> Theta:
    """Parse theta from text.

    Accepted forms: ``"a/b+c/d*i"``, ``"x+yi"`` and (float only)
    ``"exp(i*pi*p/q)"``.
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    s = text.strip().replace(" ", "")
    m = _EXP_RE.match(s)
    if m:
        if backend == EXACT:
            raise ThetaError("exact backend requires Gaussian-rational theta")
        sign = -1 if m.group(1) == "-" else 1
        p = int(m.group(2) or 1)
        q = int(m.group(3) or 1)
        if q == 0:
            raise ThetaError("zero denominator in exp(i*pi*p/q)")
        angle = sign * math.pi * p / q
        value = complex(math.cos(angle), math.sin(angle))
        return Theta(value, FLOAT, abs(abs(value) - 1.0) <= tol)
    try:
        re_, im = parse_complex(s, exact=(backend == EXACT))
    except (ValueError, ZeroDivisionError) as exc:
        raise ThetaError(f"cannot parse theta {text!r}: {exc}") from None
    value = QQi(re_, im) if backend == EXACT else complex(re_, im)
    return Theta.from_value(value, backend, tol)


def is_gaussian_rational_text(text: str) -> bool:
    try:
        parse_complex(text.strip().replace(" ", ""), exact=True)
    except (ValueError, ZeroDivisionError):
        return False
    return True
