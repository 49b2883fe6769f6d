"""Exact and floating multivariate polynomial arithmetic on the symmetric Fock space.

A polynomial in d commuting variables is stored sparsely as a map from exponent
tuples to coefficients.  Coefficients live in one of two scalar domains:

  "exact"  Gaussian rationals (pairs of ``fractions.Fraction``), closed under
           all arithmetic used here; nothing ever silently degrades to float.
  "float"  python ``complex``.

The inner product is the one the polynomials inherit from the symmetric Fock
space over C^d: monomials are orthogonal and

    <z^a, z^a> = w(a) = a! / |a|!

This weight is what makes the truncated Szego kernel reproduce point values,
    <f, szego_truncate(w, D)> = f(w)      for deg f <= D,
and that identity is the oracle the whole package trusts before anything
else runs (see tests).

The q_k family of integer-valued polynomials,

    q_0(x) = 1,   q_k(x) = (x+1)(x+2)...(x+k) / k!,

satisfies q_k(x) - q_k(x-1) = q_{k-1}(x) and q_k(n) = C(n+k, k); dimension
counts and Hilbert-polynomial fits everywhere else are phrased in this basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union


class DomainError(TypeError):
    """Raised when exact and float scalar domains are mixed implicitly."""


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianRational:
    """Complex number with rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def scale(self, c: Fraction) -> "GaussianRational":
        return GaussianRational(self.re * c, self.im * c)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        return format_coeff(self)


GR_ZERO = GaussianRational()
GR_ONE = GaussianRational(Fraction(1))

Scalar = Union[GaussianRational, complex]


def gr(re: int | str | Fraction, im: int | str | Fraction = 0) -> GaussianRational:
    """Convenience constructor: ``gr(1, "1/2")`` is 1 + (1/2)i."""
    return GaussianRational(Fraction(re), Fraction(im))


def parse_coeff(text: str) -> Scalar:
    """Parse a coefficient string.

    Accepted forms: "p/q", "p", "p/q+r/si", "-p/q-r/si", "ri", and decimal
    strings like "0.25" or "1e-3" (a decimal anywhere forces the float path).
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty coefficient string")
    if any(ch in s for ch in ".eE") and not s.lstrip("+-").startswith("e"):
        # decimal string: float path.  "e"/"E" only appear in float literals
        # here because rationals are always written p/q.
        if s.endswith(("i", "j")):
            return complex(s[:-1].replace("i", "j") + "j")
        return complex(float(s))
    # split into one or two signed parts
    parts: list[str] = []
    start = 0
    for k, ch in enumerate(s):
        if ch in "+-" and k > 0 and s[k - 1] not in "+-/":
            parts.append(s[start:k])
            start = k
    parts.append(s[start:])
    if len(parts) > 2:
        raise ValueError(f"cannot parse coefficient {text!r}")
    re = Fraction(0)
    im = Fraction(0)
    seen_im = False
    for part in parts:
        if part.endswith(("i", "j")):
            if seen_im:
                raise ValueError(f"two imaginary parts in {text!r}")
            seen_im = True
            body = part[:-1]
            if body in ("", "+"):
                im = Fraction(1)
            elif body == "-":
                im = Fraction(-1)
            else:
                im = Fraction(body)
        else:
            re = Fraction(part)
    return GaussianRational(re, im)


def format_coeff(c: Scalar) -> str:
    """Inverse of :func:`parse_coeff` for exact scalars; floats use repr."""
    if isinstance(c, GaussianRational):
        if c.im == 0:
            return str(c.re)
        if c.re == 0:
            return f"{c.im}i"
        sign = "+" if c.im > 0 else "-"
        return f"{c.re}{sign}{abs(c.im)}i"
    z = complex(c)
    if z.imag == 0.0:
        return repr(z.real)
    return repr(z)


# ---------------------------------------------------------------------------
# q_k polynomials
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def q_poly(k: int, x: int) -> Fraction:
    """q_k(x) = (x+1)(x+2)...(x+k)/k!, with q_0 = 1.

    Integer-valued on integers; equals C(x+k, k) for x >= 0.
    """
    if k < 0:
        raise ValueError("q_poly requires k >= 0")
    if k == 0:
        return Fraction(1)
    num = 1
    for j in range(1, k + 1):
        num *= x + j
    return Fraction(num, math.factorial(k))


def q_poly_float(k: int, x: float) -> float:
    if k < 0:
        raise ValueError("q_poly requires k >= 0")
    out = 1.0
    for j in range(1, k + 1):
        out *= x + j
    return out / math.factorial(k)


# ---------------------------------------------------------------------------
# monomials and Fock weights
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def monomials(d: int, n: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples of total degree n in d variables, fixed order.

    The order is the colex order induced by placing bars among stars; it is
    deterministic, which the CLI relies on for byte-identical reports.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if n < 0:
        return ()
    out = []
    for bars in combinations(range(n + d - 1), d - 1):
        prev = -1
        alpha = []
        for b in bars:
            alpha.append(b - prev - 1)
            prev = b
        alpha.append(n + d - 2 - prev)
        out.append(tuple(alpha))
    return tuple(out)


@lru_cache(maxsize=None)
def fock_weight(alpha: tuple[int, ...]) -> Fraction:
    """w(alpha) = alpha!/|alpha|!, the squared Fock norm of z^alpha."""
    n = sum(alpha)
    num = 1
    for a in alpha:
        num *= math.factorial(a)
    return Fraction(num, math.factorial(n))


@lru_cache(maxsize=None)
def multinomial(alpha: tuple[int, ...]) -> int:
    """|alpha|! / alpha!  (the reciprocal of the Fock weight)."""
    n = sum(alpha)
    den = 1
    for a in alpha:
        den *= math.factorial(a)
    return math.factorial(n) // den


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Sparse polynomial over C[z_1,...,z_d] in one scalar domain.

    ``terms`` maps exponent tuples (length d) to nonzero coefficients.  The
    zero polynomial has an empty term map and its degree is None -- a
    distinguished marker, never -1.
    """

    __slots__ = ("d", "domain", "terms")

    def __init__(self, d: int, terms: Mapping[tuple[int, ...], Scalar], domain: str | None = None):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        clean: dict[tuple[int, ...], Scalar] = {}
        inferred = domain
        for alpha, c in terms.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != d or any(a < 0 for a in alpha):
                raise ValueError(f"bad exponent vector {alpha} for d={d}")
            if isinstance(c, GaussianRational):
                dom = "exact"
                zero = c.is_zero()
            else:
                c = complex(c)
                dom = "float"
                zero = c == 0
            if inferred is None:
                inferred = dom
            elif inferred != dom:
                raise DomainError("mixed exact/float coefficients in one polynomial")
            if not zero:
                clean[alpha] = c
        self.d = d
        self.domain = inferred if inferred is not None else "exact"
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(d: int, domain: str = "exact") -> "Polynomial":
        return Polynomial(d, {}, domain)

    @staticmethod
    def constant(d: int, c: Scalar) -> "Polynomial":
        return Polynomial(d, {(0,) * d: c})

    @staticmethod
    def variable(d: int, k: int, domain: str = "exact") -> "Polynomial":
        """The polynomial z_{k+1} (0-based index k)."""
        if not 0 <= k < d:
            raise ValueError(f"variable index {k} out of range for d={d}")
        e = tuple(1 if j == k else 0 for j in range(d))
        one: Scalar = GR_ONE if domain == "exact" else 1.0 + 0j
        return Polynomial(d, {e: one}, domain)

    @staticmethod
    def monomial(d: int, alpha: Sequence[int], c: Scalar) -> "Polynomial":
        return Polynomial(d, {tuple(alpha): c})

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int | None:
        """Total degree; None for the zero polynomial."""
        if not self.terms:
            return None
        return max(sum(a) for a in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(a) for a in self.terms}
        return len(degs) <= 1

    def to_float(self) -> "Polynomial":
        """Explicit conversion to the float domain."""
        if self.domain == "float":
            return self
        return Polynomial(self.d, {a: complex(c) for a, c in self.terms.items()}, "float")

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.d != other.d:
            raise ValueError(f"dimension mismatch: {self.d} vs {other.d}")
        if self.terms and other.terms and self.domain != other.domain:
            raise DomainError("mixed exact/float polynomials; convert explicitly")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        dom = self.domain if self.terms else other.domain
        out: dict[tuple[int, ...], Scalar] = dict(self.terms)
        for a, c in other.terms.items():
            if a in out:
                out[a] = out[a] + c  # type: ignore[operator]
            else:
                out[a] = c
        return Polynomial(self.d, out, dom)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.d, {a: -c for a, c in self.terms.items()}, self.domain)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        dom = self.domain if self.terms else other.domain
        out: dict[tuple[int, ...], Scalar] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                prod = ca * cb  # type: ignore[operator]
                if key in out:
                    out[key] = out[key] + prod  # type: ignore[operator]
                else:
                    out[key] = prod
        return Polynomial(self.d, out, dom)

    def scale(self, c: Scalar) -> "Polynomial":
        if isinstance(c, GaussianRational) != (self.domain == "exact") and self.terms:
            raise DomainError("scalar domain does not match polynomial domain")
        return Polynomial(self.d, {a: t * c for a, t in self.terms.items()}, self.domain)  # type: ignore[operator]

    def shift(self, gamma: Sequence[int]) -> "Polynomial":
        """Multiply by the monomial z^gamma."""
        g = tuple(gamma)
        return Polynomial(
            self.d,
            {tuple(x + y for x, y in zip(a, g)): c for a, c in self.terms.items()},
            self.domain,
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.d == other.d
            and self.domain == other.domain
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.d, self.domain, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return f"Polynomial(d={self.d}, 0)"
        bits = [f"{format_coeff(c)}*z^{list(a)}" for a, c in sorted(self.terms.items())]
        return f"Polynomial(d={self.d}, {' + '.join(bits)})"


# ---------------------------------------------------------------------------
# inner product, evaluation, Szego kernel
# ---------------------------------------------------------------------------


def fock_inner(f: Polynomial, g: Polynomial) -> Scalar:
    """<f, g> = sum_a f_a conj(g_a) w(a); conjugate-linear in g."""
    if f.d != g.d:
        raise ValueError(f"dimension mismatch: {f.d} vs {g.d}")
    if f.terms and g.terms and f.domain != g.domain:
        raise DomainError("mixed exact/float polynomials; convert explicitly")
    small, big = (f.terms, g.terms) if len(f.terms) <= len(g.terms) else (g.terms, f.terms)
    if f.domain == "exact" and g.domain == "exact":
        acc = GR_ZERO
        for a, fa in f.terms.items():
            ga = g.terms.get(a)
            if ga is not None:
                acc = acc + (fa * ga.conjugate()).scale(fock_weight(a))
        return acc
    acc_f = 0j
    for a, fa in f.terms.items():
        ga = g.terms.get(a)
        if ga is not None:
            acc_f += complex(fa) * complex(ga).conjugate() * float(fock_weight(a))
    return acc_f


def norm_sq(f: Polynomial) -> Scalar:
    v = fock_inner(f, f)
    return v.re if isinstance(v, GaussianRational) else v.real  # type: ignore[return-value]


def evaluate(f: Polynomial, z: Sequence[complex]) -> complex:
    """Plain polynomial evaluation on the float path."""
    if len(z) != f.d:
        raise ValueError("point dimension mismatch")
    zz = [complex(w) for w in z]
    out = 0j
    for alpha, c in f.terms.items():
        term = complex(c)
        for base, e in zip(zz, alpha):
            if e:
                term *= base**e
        out += term
    return out


def evaluate_exact(f: Polynomial, z: Sequence[GaussianRational]) -> GaussianRational:
    """Evaluation over Gaussian rationals; requires an exact polynomial."""
    if f.domain != "exact":
        raise DomainError("evaluate_exact needs an exact polynomial")
    if len(z) != f.d:
        raise ValueError("point dimension mismatch")
    out = GR_ZERO
    for alpha, c in f.terms.items():
        term = c
        for base, e in zip(z, alpha):
            for _ in range(e):
                term = term * base
        out = out + term
    return out


def _point_norm_sq(w: Sequence[GaussianRational] | Sequence[complex]) -> Fraction | float:
    if w and isinstance(w[0], GaussianRational):
        return sum((c.abs_sq() for c in w), Fraction(0))  # type: ignore[union-attr]
    return float(sum(abs(complex(c)) ** 2 for c in w))


def szego_truncate(w: Sequence[Scalar], max_degree: int) -> Polynomial:
    """Degree-<=D truncation of the Szego kernel u_w(z) = 1/(1 - <z,w>).

    The coefficient of z^alpha is conj(w)^alpha * |alpha|!/alpha!.  For every
    polynomial f with deg f <= D, <f, szego_truncate(w, D)> = f(w), and the
    discarded tail has squared norm sum_{n>D} |w|^(2n).
    """
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    d = len(w)
    exact = all(isinstance(c, GaussianRational) for c in w)
    if float(_point_norm_sq(w)) >= 1.0:
        raise ValueError("szego_truncate requires |w| < 1")
    terms: dict[tuple[int, ...], Scalar] = {}
    for n in range(max_degree + 1):
        for alpha in monomials(d, n):
            m = multinomial(alpha)
            if exact:
                c = GaussianRational(Fraction(m))
                for base, e in zip(w, alpha):
                    cb = base.conjugate()  # type: ignore[union-attr]
                    for _ in range(e):
                        c = c * cb
                if not c.is_zero():
                    terms[alpha] = c
            else:
                cf = complex(m)
                for base, e in zip(w, alpha):
                    if e:
                        cf *= complex(base).conjugate() ** e
                if cf != 0:
                    terms[alpha] = cf
    return Polynomial(d, terms, "exact" if exact else "float")


def szego_tail_norm_sq(w: Sequence[Scalar], max_degree: int) -> Fraction | float:
    """|| u_w - szego_truncate(w, D) ||^2 = sum_{n > D} |w|^(2n)."""
    r2 = _point_norm_sq(w)
    if isinstance(r2, Fraction):
        if r2 >= 1:
            raise ValueError("requires |w| < 1")
        return r2 ** (max_degree + 1) / (1 - r2)
    if r2 >= 1.0:
        raise ValueError("requires |w| < 1")
    return r2 ** (max_degree + 1) / (1.0 - r2)


def poly_from_json_terms(d: int, items: Iterable[Mapping], force_float: bool = False) -> Polynomial:
    """Build a polynomial from CLI term dicts {"exponents": [...], "coeff": "..."}."""
    terms: dict[tuple[int, ...], Scalar] = {}
    parsed = [(tuple(int(a) for a in item["exponents"]), parse_coeff(str(item["coeff"]))) for item in items]
    use_float = force_float or any(not isinstance(c, GaussianRational) for _, c in parsed)
    for alpha, c in parsed:
        if len(alpha) != d:
            raise ValueError(f"exponent vector {alpha} does not have length d={d}")
        val: Scalar = complex(c) if use_float and isinstance(c, GaussianRational) else c
        if alpha in terms:
            terms[alpha] = terms[alpha] + val  # type: ignore[operator]
        else:
            terms[alpha] = val
    return Polynomial(d, terms, "float" if use_float else "exact")


def poly_to_json_terms(f: Polynomial) -> list[dict]:
    return [
        {"exponents": list(alpha), "coeff": format_coeff(c)}
        for alpha, c in sorted(f.terms.items())
    ]
