"""Hilbert-polynomial fits for eventually-polynomial dimension sequences.

A graded module's per-degree dimensions a_n agree, for large n, with an
integer combination of the q-basis polynomials:

    a_n = c_0 q_0(n) + c_1 q_1(n) + ... + c_d q_d(n),   n >= n*.

From the coefficient vector everything else is read off:

    chi    = c_d                       (Euler characteristic)
    deg    = largest k with c_k != 0   (order of the pole of the generating
                                        function at t=1, minus one)
    mu     = c_deg                     (leading pole coefficient)

and the generating function of the sequence is

    sum_n a_n t^n = p(t) + sum_k c_k / (1-t)^(k+1)

with a polynomial part p(t) collecting the pre-stabilization transient.

Fits are solved exactly over the rationals from trailing points, never by
least squares; stabilization is declared only when the trailing polynomial
reproduces a run of at least ``window`` consecutive entries (default d+2: the
d+1 points that determine the fit plus one guard point).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from .polycore import q_poly


class NotStabilized(ValueError):
    """Sequence does not settle onto one polynomial within the given range."""


class FitMismatch(ValueError):
    """A later point violates the fitted polynomial: internal inconsistency."""


@dataclass(frozen=True)
class RankSequence:
    """Integer sequence indexed from ``offset``.

    kind is "per-degree" (dim H_n) or "cumulative" (filtration dimensions,
    e.g. rank(1 - phi^{n+1}(1))); cumulative sequences must be nondecreasing.
    """

    offset: int
    values: tuple[int, ...]
    kind: str = "per-degree"

    def __post_init__(self):
        if self.kind not in ("per-degree", "cumulative"):
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "cumulative" and any(
            b < a for a, b in zip(self.values, self.values[1:])
        ):
            raise ValueError("cumulative sequence must be nondecreasing")

    def __len__(self) -> int:
        return len(self.values)

    def index_range(self):
        return range(self.offset, self.offset + len(self.values))


def cumulate(seq: RankSequence) -> RankSequence:
    """Partial sums of a per-degree sequence; the cumulative-dims filtration."""
    if seq.kind != "per-degree":
        raise ValueError("cumulate expects a per-degree sequence")
    out = []
    total = 0
    for v in seq.values:
        total += v
        out.append(total)
    return RankSequence(seq.offset, tuple(out), "cumulative")


@dataclass
class HilbertProfile:
    """Result of fitting a sequence against the q-basis."""

    d: int
    c: tuple[Fraction, ...]  # c_0 .. c_d
    stabilized_at: int  # first index n* matched by the polynomial
    transient: tuple[int, ...]  # entries before n*
    offset: int  # index of the first entry of the input
    chi: Fraction = field(init=False)
    degree_invariant: int | str = field(init=False)
    mu: Fraction | None = field(init=False)

    def __post_init__(self):
        self.chi = self.c[self.d]
        nonzero = [k for k, ck in enumerate(self.c) if ck != 0]
        if nonzero:
            k = max(nonzero)
            self.degree_invariant = k
            self.mu = self.c[k]
        elif any(self.transient):
            # dims eventually zero but not identically: finite-dimensional
            self.degree_invariant = 0
            self.mu = Fraction(0)
        else:
            self.degree_invariant = "zero-module"
            self.mu = None

    def value_at(self, n: int) -> Fraction:
        return sum((ck * q_poly(k, n) for k, ck in enumerate(self.c)), Fraction(0))

    def to_dict(self) -> dict:
        return {
            "c": [str(ck) for ck in self.c],
            "chi": str(self.chi),
            "degree": self.degree_invariant,
            "mu": None if self.mu is None else str(self.mu),
            "stabilized_at": self.stabilized_at,
            "transient": list(self.transient),
            "offset": self.offset,
            "filtration": "cumulative-dims",
        }


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over Fraction; raises on singular systems."""
    n = len(rows)
    a = [row[:] + [b] for row, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            raise FitMismatch("singular fit system (q-basis points degenerate)")
        a[c], a[piv] = a[piv], a[c]
        pv = a[c][c]
        a[c] = [x / pv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [a[i][n] for i in range(n)]


def _fit_trailing(seq: RankSequence, d: int, npts: int) -> tuple[Fraction, ...]:
    idx = list(seq.index_range())[-npts:]
    vals = list(seq.values)[-npts:]
    rows = [[q_poly(k, n) for k in range(d + 1)] for n in idx]
    sol = _solve_exact(rows, [Fraction(v) for v in vals])
    return tuple(sol)


def fit_hilbert_polynomial(
    seq: RankSequence,
    d: int,
    window: int | None = None,
    rank_bound: int | None = None,
) -> HilbertProfile:
    """Fit the trailing entries of ``seq`` in the q-basis of degree d.

    The polynomial is determined by the last d+1 entries and must reproduce at
    least ``window`` trailing entries (default d+2).  Raises NotStabilized when
    the matched run is too short, FitMismatch on non-integer or negative-chi
    fits (those indicate an inconsistent input, not a short one).
    """
    if window is None:
        window = d + 2
    window = max(window, d + 2)
    if len(seq) < window:
        raise NotStabilized(
            f"need at least {window} entries to certify stabilization, got {len(seq)}"
            " (raise the maximum degree)"
        )
    c = _fit_trailing(seq, d, d + 1)

    def profile_value(n: int) -> Fraction:
        return sum((ck * q_poly(k, n) for k, ck in enumerate(c)), Fraction(0))

    # last mismatching index determines where stabilization begins
    first_bad = None
    for n, v in zip(seq.index_range(), seq.values):
        if profile_value(n) != v:
            first_bad = n
    stabilized_at = seq.offset if first_bad is None else first_bad + 1
    matched = seq.offset + len(seq) - stabilized_at
    if matched < window:
        raise NotStabilized(
            f"only {matched} trailing entries match one polynomial; "
            f"need {window} (raise the maximum degree)"
        )
    for ck in c:
        if ck.denominator != 1:
            raise FitMismatch(f"non-integer fit coefficient {ck} on an integer sequence")
    chi = c[d]
    if chi < 0:
        raise FitMismatch(f"negative Euler characteristic {chi}")
    if rank_bound is not None and chi > rank_bound:
        raise FitMismatch(f"chi={chi} exceeds rank bound {rank_bound}")
    transient = tuple(seq.values[: stabilized_at - seq.offset])
    return HilbertProfile(d, c, stabilized_at, transient, seq.offset)


def c_invariant(seq: RankSequence, d: int, window: int | None = None) -> Fraction:
    """c(M) = d! lim dim M_n / n^d: the top q-basis coefficient of the fit."""
    if seq.kind != "cumulative":
        raise ValueError("c_invariant expects a cumulative (filtration) sequence")
    return fit_hilbert_polynomial(seq, d, window).chi


@dataclass
class GeneratingFunction:
    """hat(h)(t) = poly_part(t) + sum_k pole_coeffs[k] / (1-t)^(k+1).

    Indices of the input sequence are shifted so its first entry is the
    coefficient of t^0.
    """

    poly_part: tuple[Fraction, ...]
    pole_coeffs: tuple[Fraction, ...]

    def expand(self, n_terms: int) -> list[Fraction]:
        out = []
        for n in range(n_terms):
            v = sum(
                (ck * q_poly(k, n) for k, ck in enumerate(self.pole_coeffs)),
                Fraction(0),
            )
            if n < len(self.poly_part):
                v += self.poly_part[n]
            out.append(v)
        return out

    def to_dict(self) -> dict:
        return {
            "poly_part": [str(x) for x in self.poly_part],
            "pole_coeffs": [str(x) for x in self.pole_coeffs],
        }

    def __str__(self) -> str:
        bits = []
        for k, ck in enumerate(self.pole_coeffs):
            if ck != 0:
                bits.append(f"{ck}/(1-t)^{k + 1}")
        if any(self.poly_part):
            terms = [
                (f"{a}" if n == 0 else f"{a}*t^{n}")
                for n, a in enumerate(self.poly_part)
                if a != 0
            ]
            bits.insert(0, " + ".join(terms))
        return " + ".join(bits) if bits else "0"


def generating_function(profile: HilbertProfile, seq: RankSequence) -> GeneratingFunction:
    """Partial-fraction description of sum_n a_n t^n (n counted from 0).

    The pole coefficients are the fitted c_k; the polynomial part absorbs the
    transient.  Expanding the description reproduces the input exactly.
    """
    poly = []
    for n, v in zip(seq.index_range(), seq.values):
        if n >= profile.stabilized_at:
            break
        poly.append(Fraction(v) - profile.value_at(n))
    while poly and poly[-1] == 0:
        poly.pop()
    # re-express the pole part for the shifted index m = n - offset
    if seq.offset == 0:
        pole = profile.c
    else:
        # a_{m+offset} = sum_k c_k q_k(m + offset): expand in q_j(m) exactly
        d = profile.d
        pts = list(range(d + 1))
        rows = [[q_poly(k, m) for k in range(d + 1)] for m in pts]
        rhs = [profile.value_at(m + seq.offset) for m in pts]
        pole = tuple(_solve_exact(rows, rhs))
    gf = GeneratingFunction(tuple(poly), tuple(pole))
    # round-trip guarantee
    expanded = gf.expand(len(seq))
    for v, w in zip(seq.values, expanded):
        if Fraction(v) != w:
            raise FitMismatch("generating function does not round-trip the sequence")
    return gf
