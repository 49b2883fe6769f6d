"""Graded submodules of shifted free modules, presented by homogeneous generators.

A free module F = H^2 (x) C^r carries integer degree shifts s_1..s_r: the
monomial z^a in component j has graded degree |a| + s_j.  A presentation is a
list of homogeneous module vectors (one polynomial per component) generating a
graded submodule M; the quotient H = F/M is the object everything downstream
studies.  This module computes exact graded dimensions:

  dims_F(n) = sum_j q_{d-1}(n - s_j)          (components with n - s_j >= 0)
  dims_M(n) = rank of the coefficient matrix of { z^g * gen_i : degree n }
  dims_H(n) = dims_F(n) - dims_M(n)

Ranks are exact.  Small matrices go through fraction-free (Bareiss)
elimination over the integers; large ones are certified probabilistically by
elimination over Z_p for two independent random 31-bit primes that must agree
(31 bits keeps products inside int64 for the vectorized kernels; fixtures are
additionally cross-checked against float SVD ranks in the tests).  Complex
exact coefficients are handled by realification (Bareiss) or by mapping
i -> sqrt(-1) mod p for primes p = 1 mod 4 (modular path).

``defect_filtration_dims`` computes the canonical filtration dimensions
dim span{ f * Delta(xi) : deg f <= n } of the quotient module exactly.  The
defect range of H = F/M is the projection onto H of the component-constants
subspace K, and f * P_H(c) = P_H(f * c), so the n-th filtration space is
P_H(V_n + M) with V_n spanned by coordinate rows; its dimension reduces to
ranks of M-matrices with column subsets deleted.  These numbers are what the
float operator model's rank(1 - phi^{n+1}(1)) must reproduce block by block.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .polycore import (
    GaussianRational,
    Polynomial,
    Scalar,
    fock_weight,
    monomials,
    poly_from_json_terms,
    poly_to_json_terms,
    q_poly,
)


class PresentationError(ValueError):
    """Invalid presentation: shape, homogeneity or rank bookkeeping failure."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FreeModuleSpec:
    """Ambient dimension d, free rank r and the degree shift of each component."""

    d: int
    rank: int
    shifts: tuple[int, ...]

    def __post_init__(self):
        if self.d < 1 or self.rank < 1:
            raise PresentationError("need d >= 1 and rank >= 1")
        if len(self.shifts) != self.rank:
            raise PresentationError("rank and number of shifts disagree")

    @property
    def n_min(self) -> int:
        return min(self.shifts)


@dataclass(frozen=True)
class ModuleVector:
    """Element of the free module: one polynomial per component."""

    components: tuple[Polynomial, ...]

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)

    def homogeneous_degree(self, spec: FreeModuleSpec) -> int | None:
        """Common graded degree, or raise if the vector is not homogeneous."""
        degree: int | None = None
        for j, p in enumerate(self.components):
            if p.is_zero():
                continue
            if not p.is_homogeneous():
                mono = sorted(p.terms)[:2]
                raise PresentationError(
                    f"component {j} is not homogeneous (e.g. exponents {mono})"
                )
            dj = p.degree() + spec.shifts[j]  # type: ignore[operator]
            if degree is None:
                degree = dj
            elif degree != dj:
                raise PresentationError(
                    f"component {j} has graded degree {dj}, expected {degree}"
                )
        return degree


@dataclass(frozen=True)
class GradedPresentation:
    spec: FreeModuleSpec
    generators: tuple[ModuleVector, ...]

    @property
    def d(self) -> int:
        return self.spec.d

    def is_exact(self) -> bool:
        return all(
            p.domain == "exact" or p.is_zero()
            for g in self.generators
            for p in g.components
        )

    def is_plain_ideal(self) -> bool:
        """Rank one, shift zero: a graded polynomial ideal."""
        return self.spec.rank == 1 and self.spec.shifts == (0,)


@dataclass
class ValidationReport:
    ok: bool
    generator_degrees: list[int | None]
    errors: list[str]


@dataclass
class DimensionTable:
    n_min: int
    n_max: int
    dims_M: dict[int, int]
    dims_F: dict[int, int]
    dims_H: dict[int, int]
    exact: bool

    def h_values(self) -> list[int]:
        return [self.dims_H[n] for n in range(self.n_min, self.n_max + 1)]

    def m_values(self) -> list[int]:
        return [self.dims_M[n] for n in range(self.n_min, self.n_max + 1)]


def validate(pres: GradedPresentation) -> ValidationReport:
    """Check shapes and per-generator homogeneity; report degrees."""
    degrees: list[int | None] = []
    errors: list[str] = []
    for i, g in enumerate(pres.generators):
        if len(g.components) != pres.spec.rank:
            errors.append(f"generator {i}: {len(g.components)} components, rank is {pres.spec.rank}")
            degrees.append(None)
            continue
        bad_d = [j for j, p in enumerate(g.components) if p.d != pres.spec.d]
        if bad_d:
            errors.append(f"generator {i}: components {bad_d} have wrong ambient dimension")
            degrees.append(None)
            continue
        try:
            degrees.append(g.homogeneous_degree(pres.spec))
        except PresentationError as exc:
            errors.append(f"generator {i}: {exc}")
            degrees.append(None)
    return ValidationReport(not errors, degrees, errors)


# ---------------------------------------------------------------------------
# graded bases and coefficient rows
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _basis_cached(d: int, shifts: tuple[int, ...], n: int):
    cols: list[tuple[int, tuple[int, ...]]] = []
    for j, s in enumerate(shifts):
        for alpha in monomials(d, n - s):
            cols.append((j, alpha))
    index = {col: k for k, col in enumerate(cols)}
    return cols, index


def degree_basis(spec: FreeModuleSpec, n: int):
    """Monomial basis of F_n as (component, exponent) pairs plus index map."""
    return _basis_cached(spec.d, spec.shifts, n)


def dims_free(spec: FreeModuleSpec, n: int) -> int:
    return sum(int(q_poly(spec.d - 1, n - s)) for s in spec.shifts if n - s >= 0)


def weight_vector(spec: FreeModuleSpec, n: int) -> np.ndarray:
    cols, _ = degree_basis(spec, n)
    return np.array([float(fock_weight(alpha)) for _, alpha in cols])


def submodule_rows(pres: GradedPresentation, n: int, degrees: Sequence[int | None] | None = None):
    """Sparse coefficient rows spanning M_n: one row per (generator, monomial shift)."""
    spec = pres.spec
    if degrees is None:
        degrees = [g.homogeneous_degree(spec) for g in pres.generators]
    _, index = degree_basis(spec, n)
    rows: list[dict[int, Scalar]] = []
    for g, m in zip(pres.generators, degrees):
        if m is None or m > n:
            continue
        for gamma in monomials(spec.d, n - m):
            row: dict[int, Scalar] = {}
            for j, p in enumerate(g.components):
                for alpha, c in p.terms.items():
                    key = (j, tuple(a + b for a, b in zip(alpha, gamma)))
                    row[index[key]] = c
            if row:
                rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# exact rank machinery
# ---------------------------------------------------------------------------

_BAREISS_LIMIT = 48  # min(m, n) above which Bareiss big-integer growth hurts


def _rows_to_gaussian_int(rows, ncols):
    """Scale each row to Gaussian-integer entries (scaling preserves rank)."""
    out = []
    complex_seen = False
    for row in rows:
        den = 1
        for c in row.values():
            den = den * c.re.denominator // math.gcd(den, c.re.denominator)
            den = den * c.im.denominator // math.gcd(den, c.im.denominator)
        scaled = {}
        for k, c in row.items():
            re = int(c.re * den)
            im = int(c.im * den)
            scaled[k] = (re, im)
            if im:
                complex_seen = True
        out.append(scaled)
    return out, complex_seen


def _bareiss_rank_int(mat: list[list[int]]) -> int:
    """Fraction-free row elimination over Z; exact rank."""
    rows = len(mat)
    if rows == 0:
        return 0
    cols = len(mat[0])
    prev = 1
    r = 0
    for c in range(cols):
        piv = -1
        for i in range(r, rows):
            if mat[i][c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            mat[r], mat[piv] = mat[piv], mat[r]
        pr = mat[r]
        pv = pr[c]
        for i in range(r + 1, rows):
            ri = mat[i]
            f = ri[c]
            # every remaining row is rescaled, even when f == 0: the exact
            # divisibility of later steps depends on it
            for j in range(c, cols):
                ri[j] = (ri[j] * pv - f * pr[j]) // prev
        prev = pv
        r += 1
        if r == rows:
            break
    return r


def _rank_exact_bareiss(int_rows, ncols, complex_seen) -> int:
    if not int_rows:
        return 0
    if complex_seen:
        # realify: rank_C(A) = rank_R([[Re, -Im], [Im, Re]]) / 2
        dense = []
        for row in int_rows:
            top = [0] * (2 * ncols)
            bot = [0] * (2 * ncols)
            for k, (re, im) in row.items():
                top[k], top[k + ncols] = re, -im
                bot[k], bot[k + ncols] = im, re
            dense.append(top)
            dense.append(bot)
        return _bareiss_rank_int(dense) // 2
    dense = []
    for row in int_rows:
        r = [0] * ncols
        for k, (re, _) in row.items():
            r[k] = re
        dense.append(r)
    return _bareiss_rank_int(dense)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7):  # deterministic below 3.2e9
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _random_prime_1mod4(rng: random.Random) -> int:
    while True:
        p = rng.randrange(2**30, 2**31) | 1
        if p % 4 == 1 and _is_probable_prime(p):
            return p


def _sqrt_minus_one(p: int) -> int:
    for a in range(2, 50):
        r = pow(a, (p - 1) // 4, p)
        if r * r % p == p - 1:
            return r
    raise RuntimeError(f"no sqrt(-1) mod {p}")  # unreachable for p = 1 mod 4


def _rank_modular(int_rows, ncols, complex_seen, rng: random.Random) -> int:
    """Rank over Q(i) via agreement of ranks over two random prime fields."""
    if not int_rows:
        return 0
    results: list[int] = []
    attempts = 0
    while attempts < 6:
        p = _random_prime_1mod4(rng)
        root = _sqrt_minus_one(p) if complex_seen else 0
        dense = np.zeros((len(int_rows), ncols), dtype=np.int64)
        for i, row in enumerate(int_rows):
            for k, (re, im) in row.items():
                dense[i, k] = (re + im * root) % p
        # eliminate along the smaller dimension
        if dense.shape[0] < dense.shape[1]:
            dense = dense.T.copy()
        results.append(_kernels.rank_modp(dense, p))
        attempts += 1
        if len(results) >= 2 and results[-1] == results[-2]:
            return results[-1]
    raise PresentationError(f"modular ranks failed to agree: {results}")


def rank_of_rows(rows, ncols: int, rng: random.Random | None = None, tol: float = 1e-8):
    """Exact (or, for float data, tolerance-based) rank of sparse rows.

    Returns (rank, exact_flag).
    """
    if not rows:
        return 0, True
    if any(not isinstance(c, GaussianRational) for row in rows for c in row.values()):
        dense = np.zeros((len(rows), ncols), dtype=complex)
        for i, row in enumerate(rows):
            for k, c in row.items():
                dense[i, k] = complex(c)
        sv = np.linalg.svd(dense, compute_uv=False)
        if sv.size == 0:
            return 0, False
        return int(np.sum(sv > tol * max(1.0, float(sv[0])))), False
    int_rows, complex_seen = _rows_to_gaussian_int(rows, ncols)
    if min(len(rows), ncols) <= _BAREISS_LIMIT:
        return _rank_exact_bareiss(int_rows, ncols, complex_seen), True
    if rng is None:
        rng = random.Random(0)
    return _rank_modular(int_rows, ncols, complex_seen, rng), True


# ---------------------------------------------------------------------------
# dimension tables
# ---------------------------------------------------------------------------


def graded_piece_dim(pres: GradedPresentation, n: int, rng: random.Random | None = None) -> int:
    """Exact dimension of M_n (rank of the degree-n coefficient matrix)."""
    report = validate(pres)
    if not report.ok:
        raise PresentationError("; ".join(report.errors))
    _, index = degree_basis(pres.spec, n)
    rows = submodule_rows(pres, n, report.generator_degrees)
    rank, _ = rank_of_rows(rows, len(index), rng)
    return rank


def quotient_dims(
    pres: GradedPresentation,
    n_max: int,
    rng: random.Random | None = None,
    threads: int = 1,
) -> DimensionTable:
    """Exact dimension table of F, M and H = F/M for n_min <= n <= n_max."""
    report = validate(pres)
    if not report.ok:
        raise PresentationError("; ".join(report.errors))
    spec = pres.spec
    n_min = spec.n_min
    degrees = report.generator_degrees
    if rng is None:
        rng = random.Random(0)
    exact_all = True

    def one_degree(n: int):
        cols, _ = degree_basis(spec, n)
        rows = submodule_rows(pres, n, degrees)
        rank, exact = rank_of_rows(rows, len(cols), random.Random(rng.randrange(2**62)))
        return n, len(cols), rank, exact

    degrees_list = list(range(n_min, n_max + 1))
    if threads > 1 and len(degrees_list) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(one_degree, degrees_list))
    else:
        results = [one_degree(n) for n in degrees_list]

    dims_F: dict[int, int] = {}
    dims_M: dict[int, int] = {}
    dims_H: dict[int, int] = {}
    for n, ncols, rank, exact in results:
        expected = dims_free(spec, n)
        if expected != ncols:
            raise PresentationError(f"free-module dimension bookkeeping failed at degree {n}")
        exact_all = exact_all and exact
        dims_F[n] = ncols
        dims_M[n] = rank
        dims_H[n] = ncols - rank
        if dims_H[n] < 0:
            raise PresentationError(
                f"dims_H({n}) < 0: internal rank error ({ncols} columns, rank {rank})"
            )
    return DimensionTable(n_min, n_max, dims_M, dims_F, dims_H, exact_all)


def defect_filtration_dims(
    pres: GradedPresentation,
    n_levels: int,
    table: DimensionTable | None = None,
    rng: random.Random | None = None,
) -> list[int]:
    """Exact dims of the canonical filtration span{f * Delta(xi) : deg f <= n}.

    Entry n (0-based) equals rank(1 - phi^{n+1}(1)) of the quotient operator
    model.  The degree-m piece of the n-th filtration space is the projection
    onto H of the span of the coordinate rows {z^g e_j : |g| <= n}, so its
    dimension is (#included columns) + rank(M_m on the remaining columns)
    - dim M_m.  When every column of degree m is included this telescopes to
    dims_H(m), which is the single-shift case.
    """
    spec = pres.spec
    report = validate(pres)
    if not report.ok:
        raise PresentationError("; ".join(report.errors))
    s_min, s_max = min(spec.shifts), max(spec.shifts)
    top_degree = s_max + n_levels
    if table is None or table.n_max < top_degree:
        table = quotient_dims(pres, top_degree, rng=rng)
    if rng is None:
        rng = random.Random(1)

    @lru_cache(maxsize=None)
    def restricted_rank(m: int, excluded_shifts: tuple[int, ...]) -> int:
        # rank of M_m with all columns of components j (s_j not excluded) deleted
        cols, _ = degree_basis(spec, m)
        keep = [k for k, (j, _) in enumerate(cols) if spec.shifts[j] in excluded_shifts]
        if not keep:
            return 0
        remap = {k: i for i, k in enumerate(keep)}
        keep_set = set(keep)
        rows = []
        for row in submodule_rows(pres, m, report.generator_degrees):
            sub = {remap[k]: v for k, v in row.items() if k in keep_set}
            if sub:
                rows.append(sub)
        rank, _ = rank_of_rows(rows, len(keep), random.Random(rng.randrange(2**62)))
        return rank

    out: list[int] = []
    for n in range(n_levels + 1):
        total = 0
        for m in range(s_min, s_max + n + 1):
            included = tuple(sorted({s for s in spec.shifts if m - s <= n}))
            excluded = tuple(sorted({s for s in spec.shifts if m - s > n and m - s >= 0}))
            if not included:
                continue
            n_included_cols = sum(
                int(q_poly(spec.d - 1, m - s)) for s in spec.shifts if s in included and m - s >= 0
            )
            if not excluded:
                total += table.dims_H[m]
            else:
                total += n_included_cols + restricted_rank(m, excluded) - table.dims_M[m]
        out.append(total)
    return out


def defect_degrees_exact(pres: GradedPresentation, rng: random.Random | None = None) -> list[int]:
    """Graded degrees where the quotient's defect operator is nonzero.

    The defect of F/M is the compression of the component-constants
    projection, so degree s carries defect iff some shift-s constant survives
    projection off M_s: rank(M_s rows + constant rows) > rank(M_s rows).
    """
    report = validate(pres)
    if not report.ok:
        raise PresentationError("; ".join(report.errors))
    spec = pres.spec
    out = []
    for s in sorted(set(spec.shifts)):
        cols, index = degree_basis(spec, s)
        rows = submodule_rows(pres, s, report.generator_degrees)
        consts = [
            {index[(j, (0,) * spec.d)]: GaussianRational(Fraction(1))}
            for j, sj in enumerate(spec.shifts)
            if sj == s
        ]
        base, _ = rank_of_rows(rows, len(cols), rng)
        full, _ = rank_of_rows(rows + consts, len(cols), rng)
        if full > base:
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# JSON (module-spec files)
# ---------------------------------------------------------------------------


def presentation_from_dict(data: Mapping) -> GradedPresentation:
    try:
        d = int(data["d"])
        rank = int(data["rank"])
        shifts = tuple(int(s) for s in data["shifts"])
        gens_raw = data.get("generators", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise PresentationError(f"malformed module spec: {exc}") from exc
    spec = FreeModuleSpec(d, rank, shifts)
    gens = []
    for gi, g in enumerate(gens_raw):
        comps = g.get("components")
        if comps is None or len(comps) != rank:
            raise PresentationError(f"generator {gi}: expected {rank} components")
        polys = tuple(poly_from_json_terms(d, terms) for terms in comps)
        gens.append(ModuleVector(polys))
    return GradedPresentation(spec, tuple(gens))


def presentation_to_dict(pres: GradedPresentation) -> dict:
    return {
        "d": pres.spec.d,
        "rank": pres.spec.rank,
        "shifts": list(pres.spec.shifts),
        "generators": [
            {"components": [poly_to_json_terms(p) for p in g.components]}
            for g in pres.generators
        ],
    }


def ideal_presentation(d: int, generators: Iterable[Polynomial]) -> GradedPresentation:
    """Rank-one shift-zero presentation of a polynomial ideal."""
    spec = FreeModuleSpec(d, 1, (0,))
    return GradedPresentation(spec, tuple(ModuleVector((p,)) for p in generators))
