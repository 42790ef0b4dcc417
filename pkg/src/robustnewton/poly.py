"""Complex polynomials: representation, evaluation, normalized derivatives,
amplitude, deflation, and root bounds.

Coefficients are stored ascending: index j holds the coefficient of z^j.
Polynomials are immutable after construction and every operation here is a
pure function, so values can be shared freely across threads.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

from ._backend import kernels


def _require_finite(c: complex, what: str) -> complex:
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError(f"{what} must have finite components, got {c!r}")
    return c


class Polynomial:
    """Dense complex polynomial with ascending coefficients.

    Construction strips zero coefficients above the true degree and rejects
    the all-zero polynomial and non-finite coefficients.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [_require_finite(c, "coefficient") for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0j:
            cs.pop()
        if not cs or (len(cs) == 1 and cs[0] == 0j):
            raise ValueError("the zero polynomial has no degree")
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)

    def derivative(self) -> "Polynomial":
        """First derivative as a new polynomial (degree must be >= 1)."""
        if self.degree == 0:
            raise ValueError("derivative of a constant is the zero polynomial")
        return Polynomial([j * c for j, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "Polynomial":
        """Scale so the leading coefficient is one; roots are unchanged."""
        a = self.leading
        if a == 1.0 + 0j:
            return self
        return Polynomial([c / a for c in self.coeffs])


@dataclass(frozen=True)
class DerivativeTable:
    """Normalized derivatives of a polynomial at a point.

    values[j] == p^(j)(point)/j! for j = 0..n.  Entry 0 is p(point) and
    entry n is the leading coefficient.
    """

    values: tuple
    point: complex

    def __len__(self):
        return len(self.values)

    def __getitem__(self, j):
        return self.values[j]

    @property
    def degree(self) -> int:
        return len(self.values) - 1

    def raw(self, j: int) -> complex:
        """Unnormalized derivative p^(j)(point) = values[j] * j!."""
        return self.values[j] * math.factorial(j)


def evaluate(p: Polynomial, z: complex) -> complex:
    """p(z) by Horner's rule."""
    z = _require_finite(z, "evaluation point")
    return kernels.horner(p.coeffs, z)


def normalized_derivatives(p: Polynomial, z: complex) -> DerivativeTable:
    """All normalized derivatives p^(j)(z)/j! via repeated synthetic
    division (n Taylor-shift passes, O(n^2))."""
    z = _require_finite(z, "evaluation point")
    return DerivativeTable(values=tuple(kernels.taylor_table(p.coeffs, z)), point=z)


def amplitude(d: DerivativeTable) -> float:
    """Largest modulus among the normalized derivatives.

    Always at least |p(z)| and at least the leading coefficient's modulus,
    and strictly positive for a valid polynomial.
    """
    return kernels.table_amplitude(d.values)


def modulus_squared(p: Polynomial, z: complex) -> float:
    """F(z) = |p(z)|^2, the quantity the damped iteration decreases."""
    v = evaluate(p, z)
    return v.real * v.real + v.imag * v.imag


def deflate(p: Polynomial, r: complex) -> tuple[Polynomial, complex]:
    """Synthetic division by (z - r): returns (quotient, remainder).

    p == (z - r) * quotient + remainder, with remainder == p(r).
    """
    if p.degree < 1:
        raise ValueError("cannot deflate a constant polynomial")
    r = _require_finite(r, "deflation point")
    n = p.degree
    q = [0j] * n
    acc = p.coeffs[n]
    for j in range(n - 1, -1, -1):
        q[j] = acc
        acc = acc * r + p.coeffs[j]
    return Polynomial(q), acc


def root_radius(p: Polynomial) -> float:
    """Cauchy bound: every root lies in |z| <= 1 + max_j |a_j / a_n|."""
    if p.degree < 1:
        raise ValueError("a constant polynomial has no roots to bound")
    an = abs(p.leading)
    m = 0.0
    for c in p.coeffs[:-1]:
        m = max(m, abs(c))
    return 1.0 + m / an


# ---------------------------------------------------------------------------
# Text and JSON formats
# ---------------------------------------------------------------------------

_FLOAT = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_PURE_IMAG = re.compile(rf"^({_FLOAT}|[+-]?)i$")
_FULL = re.compile(rf"^({_FLOAT})(({_FLOAT})|[+-])i$")


def parse_complex(text: str) -> complex:
    """Parse a complex literal: ``a``, ``bi``, ``a+bi`` or ``a-bi``.

    No whitespace; the imaginary unit is a trailing ``i`` and a bare ``i``
    counts as coefficient 1.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty complex literal")
    try:
        return complex(float(s), 0.0)
    except ValueError:
        pass
    m = _PURE_IMAG.match(s)
    if m:
        b = m.group(1)
        if b in ("", "+"):
            return 1j
        if b == "-":
            return -1j
        return complex(0.0, float(b))
    m = _FULL.match(s)
    if m:
        a = float(m.group(1))
        b = m.group(2)
        if b == "+":
            return complex(a, 1.0)
        if b == "-":
            return complex(a, -1.0)
        return complex(a, float(b))
    raise ValueError(f"cannot parse complex literal {text!r}")


def format_complex(z: complex) -> str:
    """Inverse of parse_complex, shortest-roundtrip floats."""
    if z.imag == 0.0:
        return repr(z.real)
    if z.real == 0.0:
        return f"{z.imag!r}i"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def parse_poly(text: str) -> Polynomial:
    """Parse ascending comma-separated complex coefficients,
    e.g. ``-1,0,1`` for z^2 - 1."""
    parts = text.split(",")
    return Polynomial([parse_complex(s) for s in parts])


def poly_to_json(p: Polynomial) -> dict:
    """JSON form: {"coeffs": [[re, im], ...]} ascending."""
    return {"coeffs": [[c.real, c.imag] for c in p.coeffs]}


def poly_from_json(obj) -> Polynomial:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "coeffs" not in obj:
        raise ValueError('polynomial JSON must be an object with a "coeffs" key')
    coeffs = []
    for pair in obj["coeffs"]:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValueError("each coefficient must be a [re, im] pair")
        coeffs.append(complex(float(pair[0]), float(pair[1])))
    return Polynomial(coeffs)
