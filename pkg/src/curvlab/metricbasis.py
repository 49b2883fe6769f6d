"""Metric bases of graded ideals from defect eigenvectors of the submodule.

For a graded ideal I (rank-one, shift-zero presentation) let M_n be its
degree-n piece inside H^2.  The submodule carries its own multiplication
blocks A_k : M_{n-1} -> M_n and defect blocks

    Delta^2_n = 1_{M_n} - sum_k A_k A_k^*.

Eigenvectors psi of Delta_n with eigenvalue lambda > 0 produce the metric
basis elements phi = lambda * psi = Delta psi; degree by degree the elements
satisfy the frame identity

    sum_{phi in Phi_n} phi phi^* = Delta^2 E_n,

which pins the basis up to a degreewise unitary (any two families with equal
frame operators are unitarily equivalent; ``frame_unitary`` recovers the
rotation by the polar-decomposition argument).  Inner-sequence behaviour is
checked strictly inside the ball through the exact identity

    sum_phi |phi(z)|^2 = (1 - |z|^2) * sum_n || P_{M_n} kappa_n(z) ||^2,

kappa_n(z) being the degree-n component of the Szego kernel at z; both sides
are truncated at degree D with a geometric tail bound |z|^(2(D+1))/(1-|z|^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .polycore import Polynomial, fock_weight, multinomial
from .presentation import (
    DimensionTable,
    GradedPresentation,
    PresentationError,
    degree_basis,
    quotient_dims,
    submodule_rows,
    validate,
)
from .oplab import ModelError, numeric_rank

FRAME_TOL = 1e-8


class SubmoduleModel:
    """Degreewise orthonormal model of the closed submodule M = closure(I)."""

    def __init__(self, pres: GradedPresentation, n_max: int):
        self.pres = pres
        self.d = pres.spec.d
        self.n_max = n_max
        self.dim: dict[int, int] = {}
        self.onb_scaled: dict[int, np.ndarray] = {}
        self.mult: dict[tuple[int, int], np.ndarray] = {}  # A_k: M_{n-1} -> M_n
        self.delta2: dict[int, np.ndarray] = {}
        self.lowest: int | None = None  # lowest degree with M_n != 0
        self.rank: int = 0
        self.table: DimensionTable | None = None


def build_submodule_model(
    pres: GradedPresentation,
    n_max: int,
    table: DimensionTable | None = None,
) -> SubmoduleModel:
    """Orthonormalize each M_n, build A_k blocks and defect blocks on M."""
    if not pres.is_plain_ideal():
        raise PresentationError("submodule models need a rank-1, shift-0 ideal presentation")
    report = validate(pres)
    if not report.ok:
        raise PresentationError("; ".join(report.errors))
    if all(g.is_zero() for g in pres.generators):
        raise PresentationError("submodule model needs a nonzero generator list")
    if table is None or table.n_max < n_max:
        table = quotient_dims(pres, n_max)
    model = SubmoduleModel(pres, n_max)
    model.table = table
    d = pres.spec.d
    for n in range(0, n_max + 1):
        cols, index = degree_basis(pres.spec, n)
        ncols = len(cols)
        sqw = np.sqrt(np.array([float(fock_weight(a)) for _, a in cols]))
        rows = submodule_rows(pres, n, report.generator_degrees)
        if not rows:
            model.dim[n] = 0
            model.onb_scaled[n] = np.zeros((ncols, 0), dtype=complex)
            model.delta2[n] = np.zeros((0, 0), dtype=complex)
            continue
        a = np.zeros((len(rows), ncols), dtype=complex)
        for i, row in enumerate(rows):
            for c, v in row.items():
                a[i, c] = complex(v)
        b_hat = (a * sqw[None, :]).T
        norms = np.linalg.norm(b_hat, axis=0)
        norms[norms == 0.0] = 1.0
        b_hat /= norms[None, :]
        u, sv, _ = np.linalg.svd(b_hat, full_matrices=False)
        r = numeric_rank(sv)
        if table.dims_M[n] != r and table.exact:
            raise ModelError(f"numeric rank {r} != exact dim M_{n} = {table.dims_M[n]}")
        q = u[:, :r]
        model.dim[n] = r
        model.onb_scaled[n] = q
        if model.lowest is None and r:
            model.lowest = n
    # multiplication blocks and defects
    for n in range(0, n_max + 1):
        r = model.dim[n]
        d2 = np.eye(r, dtype=complex)
        if n >= 1 and r:
            cols_prev, _ = degree_basis(pres.spec, n - 1)
            cols, index = degree_basis(pres.spec, n)
            q_prev = model.onb_scaled[n - 1]
            q = model.onb_scaled[n]
            for k in range(d):
                scat = np.zeros((len(cols), q_prev.shape[1]), dtype=complex)
                if q_prev.shape[1]:
                    for c, (j, alpha) in enumerate(cols_prev):
                        beta = list(alpha)
                        beta[k] += 1
                        t = index[(j, tuple(beta))]
                        fac = math.sqrt(float(fock_weight(tuple(beta)) / fock_weight(alpha)))
                        scat[t] += fac * q_prev[c]
                ak = q.conj().T @ scat
                model.mult[(k, n)] = ak
                d2 -= ak @ ak.conj().T
        if r:
            ev = np.linalg.eigvalsh(d2)
            if ev.min() < -1e-10 or ev.max() > 1.0 + 1e-9:
                raise ModelError(
                    f"submodule defect eigenvalues at degree {n} outside [0,1]"
                )
        model.delta2[n] = d2
    model.rank = sum(
        numeric_rank(np.sort(np.abs(np.linalg.eigvalsh(b)))[::-1])
        for b in model.delta2.values()
        if b.size
    )
    return model


# ---------------------------------------------------------------------------
# the metric basis
# ---------------------------------------------------------------------------


@dataclass
class BasisElement:
    degree: int
    lambda_sq: float
    poly: Polynomial  # phi = lambda * psi
    coords_onb: np.ndarray  # coordinates of phi in the M_n orthonormal basis
    near_cutoff: bool = False

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "lambda_sq": self.lambda_sq,
            "terms": [
                {"exponents": list(a), "coeff": repr(complex(c))}
                for a, c in sorted(self.poly.terms.items())
            ],
        }


@dataclass
class MetricBasis:
    elements: list[BasisElement]
    cutoff: float
    counts: dict[int, int] = field(init=False)

    def __post_init__(self):
        self.counts = {}
        for el in self.elements:
            self.counts[el.degree] = self.counts.get(el.degree, 0) + 1

    def of_degree(self, n: int) -> list[BasisElement]:
        return [el for el in self.elements if el.degree == n]

    def up_to(self, n: int) -> list[BasisElement]:
        return [el for el in self.elements if el.degree <= n]


def metric_basis(model: SubmoduleModel, cutoff: float | None = None) -> MetricBasis:
    """Eigendecompose each defect block; phi = lambda * psi per eigenpair.

    Phases are fixed so each element's first nonzero monomial coefficient is
    real positive; eigenvalues within 10x of the cutoff are flagged.
    """
    lam_max = max(
        (float(np.linalg.eigvalsh(b).max()) for b in model.delta2.values() if b.size),
        default=0.0,
    )
    if cutoff is None:
        cutoff = 1e-10 * max(1.0, lam_max)
    elements: list[BasisElement] = []
    for n in range(0, model.n_max + 1):
        d2 = model.delta2[n]
        if not d2.size:
            continue
        ev, vec = np.linalg.eigh(d2)
        cols, _ = degree_basis(model.pres.spec, n)
        sqw = np.sqrt(np.array([float(fock_weight(a)) for _, a in cols]))
        order = np.argsort(ev)[::-1]
        for i in order:
            if ev[i] <= cutoff:
                continue
            lam = math.sqrt(float(ev[i]))
            coords = lam * vec[:, i]
            raw = model.onb_scaled[n] @ coords / sqw  # monomial coefficients
            j = int(np.argmax(np.abs(raw) > 1e-12 * max(1.0, np.abs(raw).max())))
            phase = raw[j] / abs(raw[j])
            raw = raw * phase.conjugate()
            coords = coords * phase.conjugate()
            terms = {
                alpha: complex(c)
                for (_, alpha), c in zip(cols, raw)
                if abs(c) > 1e-13
            }
            elements.append(
                BasisElement(
                    degree=n,
                    lambda_sq=float(ev[i]),
                    poly=Polynomial(model.d, terms, "float"),
                    coords_onb=coords,
                    near_cutoff=bool(ev[i] <= 10.0 * cutoff),
                )
            )
    return MetricBasis(elements, cutoff)


def frame_residual(basis: MetricBasis, model: SubmoduleModel, n: int) -> float:
    """max-norm of sum_phi phi phi^* - Delta^2_n in the M_n coordinates."""
    d2 = model.delta2[n]
    acc = np.zeros_like(d2)
    for el in basis.of_degree(n):
        acc += np.outer(el.coords_onb, el.coords_onb.conj())
    if not d2.size:
        return 0.0
    return float(np.abs(acc - d2).max())


# ---------------------------------------------------------------------------
# inner-sequence profiles
# ---------------------------------------------------------------------------


@dataclass
class ProfileRow:
    point: tuple[complex, ...]
    max_degree: int
    partial_sum: float
    oracle: float
    residual: float
    tail_bound: float
    monotone: bool
    bounded: bool

    def to_dict(self) -> dict:
        return {
            "point": [repr(z) for z in self.point],
            "D": self.max_degree,
            "partial_sum": self.partial_sum,
            "oracle": self.oracle,
            "residual": self.residual,
            "tail_bound": self.tail_bound,
            "monotone": self.monotone,
            "bounded": self.bounded,
        }


def inner_sequence_profile(
    basis: MetricBasis,
    model: SubmoduleModel,
    points: Sequence[Sequence[complex]],
    max_degree: int,
) -> list[ProfileRow]:
    """Interior identity check: partial sums against the projected-kernel oracle.

    Points must lie strictly inside the ball; the identity is exact up to the
    reported geometric tail bound on both truncations.
    """
    if max_degree > model.n_max:
        raise ValueError("profile degree exceeds the built model range")
    rows = []
    for pt in points:
        z = tuple(complex(c) for c in pt)
        r2 = sum(abs(c) ** 2 for c in z)
        if r2 >= 1.0 - 1e-12:
            raise ValueError("profile points must lie strictly inside the unit ball")
        # partial sums by degree, for monotonicity
        by_degree = np.zeros(max_degree + 1)
        for el in basis.elements:
            if el.degree <= max_degree:
                val = el.poly
                from .polycore import evaluate

                by_degree[el.degree] += abs(evaluate(val, z)) ** 2
        cums = np.cumsum(by_degree)
        monotone = bool(np.all(by_degree >= -1e-15))
        bounded = bool(cums[-1] <= 1.0 + 1e-8)
        # oracle: (1-|z|^2) sum_n ||P_{M_n} kappa_n(z)||^2
        oracle = 0.0
        for n in range(0, max_degree + 1):
            if model.dim[n] == 0:
                continue
            cols, _ = degree_basis(model.pres.spec, n)
            kap = np.array(
                [
                    multinomial(alpha)
                    * np.prod([zz.conjugate() ** e for zz, e in zip(z, alpha)])
                    for _, alpha in cols
                ],
                dtype=complex,
            )
            sqw = np.sqrt(np.array([float(fock_weight(a)) for _, a in cols]))
            proj = model.onb_scaled[n].conj().T @ (sqw * kap)
            oracle += float(np.sum(np.abs(proj) ** 2))
        oracle *= 1.0 - r2
        tail = r2 ** (max_degree + 1) / (1.0 - r2)
        rows.append(
            ProfileRow(
                point=z,
                max_degree=max_degree,
                partial_sum=float(cums[-1]),
                oracle=oracle,
                residual=abs(float(cums[-1]) - oracle),
                tail_bound=tail,
                monotone=monotone,
                bounded=bounded,
            )
        )
    return rows


def boundary_trend(
    basis: MetricBasis, zeta: Sequence[complex], degree_steps: Sequence[int]
) -> list[tuple[int, float]]:
    """Qualitative partial-sum trend at a sphere point (no identity asserted)."""
    from .polycore import evaluate

    z = tuple(complex(c) for c in zeta)
    out = []
    for D in degree_steps:
        s = sum(
            abs(evaluate(el.poly, z)) ** 2 for el in basis.elements if el.degree <= D
        )
        out.append((D, float(s)))
    return out


# ---------------------------------------------------------------------------
# codimension report
# ---------------------------------------------------------------------------


def codimension_report(
    pres: GradedPresentation,
    n_max: int,
    table: DimensionTable | None = None,
    basis: MetricBasis | None = None,
) -> dict:
    """Quotient dimensions per degree plus a finite-codimension verdict.

    Finite codimension is declared after d+1 consecutive zero quotient pieces
    (a graded quotient algebra that vanishes on such a window stays zero), and
    is correlated with the metric basis count stalling.  Infinite codimension
    is declared only when the per-degree dimensions certify a nonzero Hilbert
    polynomial; a short window stays inconclusive.
    """
    if not pres.is_plain_ideal():
        raise PresentationError("codimension reports need an ideal presentation")
    if table is None or table.n_max < n_max:
        table = quotient_dims(pres, n_max)
    d = pres.spec.d
    dims = [table.dims_H[n] for n in range(0, n_max + 1)]
    window = d + 1
    verdict = "inconclusive"
    codim: int | None = None
    zero_run = 0
    for n, v in enumerate(dims):
        zero_run = zero_run + 1 if v == 0 else 0
        if zero_run >= window:
            verdict = "finite"
            codim = sum(dims[: n + 1])
            break
    if verdict == "inconclusive":
        from .hilbert import FitMismatch, NotStabilized, RankSequence, fit_hilbert_polynomial

        try:
            prof = fit_hilbert_polynomial(RankSequence(0, tuple(dims)), d)
            if any(prof.c):
                verdict = "infinite"
        except (NotStabilized, FitMismatch):
            pass
    report = {
        "dims_H": dims,
        "verdict": verdict,
        "codimension": codim,
        "window": window,
    }
    if basis is not None:
        counts = [basis.counts.get(n, 0) for n in range(0, n_max + 1)]
        report["basis_counts"] = counts
        if verdict == "finite":
            stop = next(n for n in range(len(dims)) if sum(dims[n:]) == 0)
            report["basis_stalls"] = all(c == 0 for c in counts[stop + 1 :])
    return report


# ---------------------------------------------------------------------------
# frame equivalence
# ---------------------------------------------------------------------------


class FrameMismatch(ValueError):
    """Frame operators differ: the two families are not unitarily related."""


def frame_unitary(
    s_vectors: np.ndarray, t_vectors: np.ndarray, tol: float = FRAME_TOL
) -> np.ndarray:
    """Unitary W with eta_i = sum_j W[i, j] xi_j, from equal frame operators.

    ``s_vectors`` and ``t_vectors`` hold the vectors as columns.  Both lists
    must be linearly independent and have equal frame operators
    sum xi xi^* = sum eta eta^* within ``tol``; the rotation comes from the
    polar decompositions X = P U, Y = P V via W = (U^* V)^T.
    """
    x = np.asarray(s_vectors, dtype=complex)
    y = np.asarray(t_vectors, dtype=complex)
    fx = x @ x.conj().T
    fy = y @ y.conj().T
    if fx.shape != fy.shape or float(np.abs(fx - fy).max()) > tol:
        raise FrameMismatch("frame operators differ; not equivalent")
    ux, sx, vxh = np.linalg.svd(x, full_matrices=False)
    uy, sy, vyh = np.linalg.svd(y, full_matrices=False)
    if numeric_rank(sx) < x.shape[1] or numeric_rank(sy) < y.shape[1]:
        raise ValueError("input vectors are linearly dependent")
    qx = ux @ vxh  # isometry factor of the polar decomposition
    qy = uy @ vyh
    w = qx.conj().T @ qy
    resid = float(np.abs(y - x @ w).max())
    if resid > tol:
        raise FrameMismatch(f"recovered rotation residual {resid:.2e} above {tol}")
    return w.T
