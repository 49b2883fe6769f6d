"""Floating-point operator model of the quotient H = F/M and its curvature.

Per graded degree n the model holds an orthonormal basis of H_n = (M_n)^perp
inside F_n under the Fock inner product, the compression blocks

    T(k, n) = P_{H_{n+1}} M_{z_k} |_{H_n},

and the defect blocks Delta^2_n = 1 - sum_k T(k,n-1) T(k,n-1)^*.  Everything
numeric about curvature runs on these blocks:

  * phi_apply iterates the completely positive map
        phi(A) = sum_k T_k A T_k^*,
    whose degree support shifts up by one each application.
  * defect_sum_sequence accumulates S_n = sum_{j<=n} phi^j(Delta^2)
        = 1 - phi^{n+1}(1);
    trace(S_n) and the tolerance-rank of S_n drive the Euler/curvature
    asymptotics, and the rank sequence must agree with the exact canonical
    filtration dimensions computed by the presentation layer.
  * curvature_asymptotic estimates
        K(H) = (d-1)! lim trace(phi^n(Delta^2)) / n^(d-1)
    by an exact-degree fit in the q-basis when the trace sequence is
    eventually exactly polynomial (true for quotients by uniformly shifted
    submodules, where trace phi^n(Delta^2) = dim H_n), and otherwise by
    Richardson extrapolation of trace(phi^n(Delta^2))/q_{d-1}(n) in powers of
    1/n (mixed-shift presentations produce genuinely non-polynomial tails).
  * boundary_curvature_point evaluates (1-r^2) trace F(r zeta) with
        F(z) = Delta (1 - T(z)^*)^{-1} (1 - T(z))^{-1} Delta,
    T(z) = sum_k conj(z_k) T_k, via a Neumann sum truncated at a depth whose
    geometric tail bound is below the requested tolerance.
  * curvature_monte_carlo integrates the boundary values over the sphere with
    normalized complex Gaussian samples.

Internally each degree uses coordinates scaled by sqrt of the Fock weights,
so orthonormality is the standard one; for presentations with no generators
the scaled basis is the identity and multiplication acts by index scatter
without ever materializing dense blocks.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .hilbert import HilbertProfile, RankSequence, fit_hilbert_polynomial
from .polycore import fock_weight, q_poly
from .presentation import (
    DimensionTable,
    FreeModuleSpec,
    GradedPresentation,
    GradedPresentation as _GP,
    PresentationError,
    degree_basis,
    quotient_dims,
    submodule_rows,
    validate,
)

RANK_TOL = 1e-8  # relative singular-value threshold for numeric ranks
_DELTA_CROSS_CHECK_DIM = 400  # block size cap for the redundant defect route
GRAM_TOL = 1e-10
EIG_FLOOR = -1e-10
EIG_CEIL = 1.0 + 1e-9


class ModelError(RuntimeError):
    """Numeric degeneracy or bookkeeping failure while building the model."""


class DepthError(RuntimeError):
    """Neumann depth would exceed the built degree range."""


BlockOperator = Mapping[int, np.ndarray]


def numeric_rank(sv: np.ndarray, tol: float = RANK_TOL) -> int:
    if sv.size == 0:
        return 0
    return int(np.sum(sv > tol * max(1.0, float(sv[0]))))


@dataclass
class CurvatureEstimate:
    method: str  # asymptotic | boundary-mc | gauss-bonnet
    value: float
    uncertainty: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "value": self.value,
            "uncertainty": self.uncertainty,
            "diagnostics": self.diagnostics,
        }


class QuotientModel:
    """Graded orthonormal model of H = F/M on degrees n_min..n_max."""

    def __init__(self, pres: GradedPresentation, n_max: int):
        self.pres = pres
        self.spec = pres.spec
        self.n_max = n_max
        self.n_min = pres.spec.n_min
        self.dim: dict[int, int] = {}
        self.onb_scaled: dict[int, np.ndarray | None] = {}  # None = identity
        self.mult_maps: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}
        self.const_rows: dict[int, np.ndarray] = {}
        self.delta2: dict[int, np.ndarray] = {}
        self._t_cache: dict[tuple[int, int], np.ndarray] = {}
        self.defect_pairs: list[tuple[int, float, np.ndarray]] = []
        self.defect_degrees: list[int] = []
        self.rank: int = 0
        self.trace_delta2: float = 0.0
        self.diagnostics: dict = {}
        self.table: DimensionTable | None = None

    # -- degree-local operators -------------------------------------------

    @property
    def d(self) -> int:
        return self.spec.d

    def degrees(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def T(self, k: int, n: int) -> np.ndarray:
        """Dense compression block H_n -> H_{n+1} for multiplication by z_k."""
        key = (k, n)
        cached = self._t_cache.get(key)
        if cached is not None:
            return cached
        if not (self.n_min <= n < self.n_max):
            raise ModelError(f"block T({k},{n}) outside built range")
        tgt, fac = self.mult_maps[key]
        qn = self.onb_scaled[n]
        qn1 = self.onb_scaled[n + 1]
        ncols1 = len(degree_basis(self.spec, n + 1)[0])
        if qn is None:
            src = np.eye(self.dim[n], dtype=complex)
        else:
            src = qn
        scat = np.zeros((ncols1, src.shape[1]), dtype=complex)
        scat[tgt] = fac[:, None] * src
        t = scat if qn1 is None else qn1.conj().T @ scat
        self._t_cache[key] = t
        return t

    def apply_tz(self, n: int, x: np.ndarray, zbar: np.ndarray) -> np.ndarray:
        """Apply T(z) = sum_k conj(z_k) T_k to columns of x living in H_n."""
        qn = self.onb_scaled[n]
        qn1 = self.onb_scaled[n + 1]
        u = x if qn is None else qn @ x
        ncols1 = len(degree_basis(self.spec, n + 1)[0])
        v = np.zeros((ncols1,) + x.shape[1:], dtype=complex)
        for k in range(self.d):
            tgt, fac = self.mult_maps[(k, n)]
            # target indices are distinct for fixed k, so fancy += is safe
            if x.ndim == 1:
                v[tgt] += zbar[k] * fac * u
            else:
                v[tgt] += zbar[k] * fac[:, None] * u
        return v if qn1 is None else qn1.conj().T @ v


def build_quotient_model(
    pres: GradedPresentation,
    n_max: int,
    table: DimensionTable | None = None,
    rng: random.Random | None = None,
    threads: int = 1,
    check_exact: bool | None = None,
) -> QuotientModel:
    """Orthonormalize every graded piece and assemble T and Delta^2 blocks.

    When the presentation is exact the numeric rank of each degree is checked
    against the exact dimension table; a mismatch is a hard failure.
    """
    report = validate(pres)
    if not report.ok:
        raise PresentationError("; ".join(report.errors))
    spec = pres.spec
    model = QuotientModel(pres, n_max)
    if check_exact is None:
        check_exact = pres.is_exact()
    if check_exact and (table is None or table.n_max < n_max):
        table = quotient_dims(pres, n_max, rng=rng, threads=threads)
    model.table = table

    gen_degrees = report.generator_degrees
    has_gens = any(not g.is_zero() for g in pres.generators)
    gram_worst = 0.0
    borderline: list[int] = []

    for n in model.degrees():
        cols, index = degree_basis(spec, n)
        ncols = len(cols)
        sqw = np.sqrt(np.array([float(fock_weight(a)) for _, a in cols])) if ncols else np.zeros(0)
        rows = submodule_rows(pres, n, gen_degrees) if has_gens else []
        if not rows:
            model.onb_scaled[n] = None
            model.dim[n] = ncols
        else:
            a = np.zeros((len(rows), ncols), dtype=complex)
            for i, row in enumerate(rows):
                for c, v in row.items():
                    a[i, c] = complex(v)
            # columns of b_hat are the scaled coordinate vectors spanning M_n,
            # normalized so the rank threshold is scale-free
            b_hat = (a * sqw[None, :]).T
            norms = np.linalg.norm(b_hat, axis=0)
            norms[norms == 0.0] = 1.0
            b_hat = b_hat / norms[None, :]
            u, sv, _ = np.linalg.svd(b_hat, full_matrices=True)
            r = numeric_rank(sv)
            if sv.size and any(
                RANK_TOL * 0.1 < s / max(1.0, sv[0]) < RANK_TOL * 10.0 for s in sv
            ):
                borderline.append(n)
            if table is not None and table.n_min <= n <= table.n_max:
                if r != table.dims_M[n]:
                    raise ModelError(
                        f"numeric rank {r} != exact dim M_{n} = {table.dims_M[n]}"
                    )
            q = u[:, r:]
            model.onb_scaled[n] = q
            model.dim[n] = q.shape[1]
            gram = q.conj().T @ q
            gram_worst = max(gram_worst, float(np.abs(gram - np.eye(q.shape[1])).max()) if q.size else 0.0)
        # multiplication index maps into degree n+1
        if n < n_max:
            cols1, index1 = degree_basis(spec, n + 1)
            for k in range(spec.d):
                tgt = np.empty(ncols, dtype=np.int64)
                fac = np.empty(ncols, dtype=float)
                for c, (j, alpha) in enumerate(cols):
                    beta = list(alpha)
                    beta[k] += 1
                    beta_t = tuple(beta)
                    tgt[c] = index1[(j, beta_t)]
                    fac[c] = math.sqrt(float(fock_weight(beta_t) / fock_weight(alpha)))
                model.mult_maps[(k, n)] = (tgt, fac)
        # coordinates of the component constants (the free-module defect)
        model.const_rows[n] = np.array(
            [c for c, (j, alpha) in enumerate(cols) if sum(alpha) == 0], dtype=np.int64
        )

    if gram_worst > GRAM_TOL:
        raise ModelError(f"orthonormality residual {gram_worst:.2e} above {GRAM_TOL}")

    # Defect blocks.  Delta^2 = 1 - sum_k T_k T_k^* equals the compression
    # P_H C P_H of the ambient component-constants projection C, so it can be
    # nonzero only at degrees carrying a component constant; those blocks are
    # computed directly (cheap) and cross-checked against the T-block route
    # wherever the dense blocks stay moderate.
    for n in model.degrees():
        crows = model.const_rows[n]
        dim = model.dim[n]
        if crows.size == 0 or dim == 0:
            continue
        q = model.onb_scaled[n]
        if q is None:
            direct = np.zeros((dim, dim), dtype=complex)
            direct[crows, crows] = 1.0
        else:
            sub = q[crows, :]
            direct = sub.conj().T @ sub
        if (
            n > model.n_min
            and dim <= _DELTA_CROSS_CHECK_DIM
            and model.dim.get(n - 1, 0) <= _DELTA_CROSS_CHECK_DIM
        ):
            d2 = np.eye(dim, dtype=complex)
            for k in range(spec.d):
                t = model.T(k, n - 1)
                d2 -= t @ t.conj().T
            if float(np.abs(d2 - direct).max()) > 1e-9:
                raise ModelError(f"defect block mismatch at degree {n}")
        herm = float(np.abs(direct - direct.conj().T).max())
        if herm > 1e-10:
            raise ModelError(f"Delta^2 at degree {n} not Hermitian ({herm:.2e})")
        ev = np.linalg.eigvalsh(direct)
        if ev.min() < EIG_FLOOR or ev.max() > EIG_CEIL:
            raise ModelError(
                f"Delta^2 eigenvalues at degree {n} outside [0,1]: "
                f"[{ev.min():.2e}, {ev.max():.2e}]"
            )
        if float(np.abs(direct).max()) > 1e-14:
            model.delta2[n] = direct

    # defect eigendata and rank
    total_rank = 0
    trace = 0.0
    for n in sorted(model.delta2):
        d2 = model.delta2[n]
        if not d2.size:
            continue
        ev, vec = np.linalg.eigh(d2)
        lam_max = float(ev.max(initial=0.0))
        cut = 1e-10 * max(1.0, lam_max)
        nrank = numeric_rank(np.sort(np.abs(ev))[::-1])
        if nrank:
            model.defect_degrees.append(n)
            total_rank += nrank
        for i in range(len(ev)):
            if ev[i] > cut:
                v = vec[:, i]
                j = int(np.argmax(np.abs(v) > 1e-12))
                phase = v[j] / abs(v[j])
                model.defect_pairs.append((n, float(ev[i]), v * phase.conjugate()))
        trace += float(ev[ev > cut].sum())
    model.rank = total_rank
    model.trace_delta2 = trace
    model.diagnostics = {
        "gram_residual": gram_worst,
        "borderline_rank_degrees": borderline,
        "defect_degrees": model.defect_degrees,
    }
    return model


def free_model(d: int, rank: int, n_max: int) -> QuotientModel:
    spec = FreeModuleSpec(d, rank, (0,) * rank)
    return build_quotient_model(GradedPresentation(spec, ()), n_max, check_exact=False)


# ---------------------------------------------------------------------------
# the completely positive map and its iterates
# ---------------------------------------------------------------------------


def identity_blocks(model: QuotientModel) -> dict[int, np.ndarray]:
    return {n: np.eye(model.dim[n], dtype=complex) for n in model.degrees() if model.dim[n]}


def phi_apply(model: QuotientModel, x: BlockOperator) -> tuple[dict[int, np.ndarray], bool]:
    """One application of phi(A) = sum_k T_k A T_k^*; support shifts up by one.

    Returns the new blocks and a truncation flag (True when input support
    touches n_max so part of the image falls outside the built range).
    """
    out: dict[int, np.ndarray] = {}
    truncated = False
    for n, block in x.items():
        if n >= model.n_max:
            truncated = True
            continue
        m = n + 1
        acc = out.get(m)
        if acc is None:
            acc = np.zeros((model.dim[m], model.dim[m]), dtype=complex)
        if model.onb_scaled[n] is None and model.onb_scaled[m] is None:
            for k in range(model.d):
                tgt, fac = model.mult_maps[(k, n)]
                acc[np.ix_(tgt, tgt)] += (fac[:, None] * fac[None, :]) * block
        else:
            for k in range(model.d):
                t = model.T(k, n)
                acc += t @ block @ t.conj().T
        out[m] = acc
    out = {n: b for n, b in out.items() if b.size}
    return out, truncated


@dataclass
class DefectSums:
    trace_seq: list[float]  # trace(1 - phi^{n+1}(1)) = trace(S_n)
    rank_seq: list[int]  # tolerance-rank(S_n)
    step_traces: list[float]  # trace(phi^n(Delta^2))
    truncated: bool


def defect_sum_sequence(model: QuotientModel, n_levels: int) -> DefectSums:
    """Accumulate S_n = sum_{j<=n} phi^j(Delta^2) and report traces and ranks."""
    top = max(model.defect_degrees, default=model.n_min)
    truncated = top + n_levels > model.n_max
    power = {n: b.copy() for n, b in model.delta2.items() if b.size and np.abs(b).max() > 1e-14}
    s_blocks: dict[int, np.ndarray] = {}
    trace_seq: list[float] = []
    rank_seq: list[int] = []
    step_traces: list[float] = []
    for level in range(n_levels + 1):
        for n, b in power.items():
            if n in s_blocks:
                s_blocks[n] = s_blocks[n] + b
            else:
                s_blocks[n] = b.copy()
        step_traces.append(float(sum(np.trace(b).real for b in power.values())))
        trace_seq.append(float(sum(np.trace(b).real for b in s_blocks.values())))
        rank = 0
        for b in s_blocks.values():
            ev = np.sort(np.abs(np.linalg.eigvalsh(b)))[::-1]
            rank += numeric_rank(ev)
        rank_seq.append(rank)
        if level < n_levels:
            power, trunc = phi_apply(model, power)
            truncated = truncated or trunc
    return DefectSums(trace_seq, rank_seq, step_traces, truncated)


def phi_power_traces(model: QuotientModel, n_levels: int) -> list[float]:
    """trace(phi^n(Delta^2)) for n = 0..n_levels."""
    power = {n: b.copy() for n, b in model.delta2.items() if b.size and np.abs(b).max() > 1e-14}
    out = []
    for level in range(n_levels + 1):
        out.append(float(sum(np.trace(b).real for b in power.values())))
        if level < n_levels:
            power, truncated = phi_apply(model, power)
            if truncated:
                raise ModelError("phi iteration ran past n_max; raise the maximum degree")
    return out


def euler_numeric(model: QuotientModel, n_levels: int | None = None) -> HilbertProfile:
    """Rank route to chi: fit the tolerance-rank sequence of 1 - phi^{n+1}(1)."""
    top = max(model.defect_degrees, default=model.n_min)
    if n_levels is None:
        n_levels = model.n_max - top
    sums = defect_sum_sequence(model, n_levels)
    if sums.truncated:
        raise ModelError("defect sums truncated; raise the maximum degree")
    seq = RankSequence(0, tuple(sums.rank_seq), "cumulative")
    return fit_hilbert_polynomial(seq, model.d)


# ---------------------------------------------------------------------------
# curvature: asymptotic route
# ---------------------------------------------------------------------------


def _qbasis_fit_float(ns: Sequence[int], vals: Sequence[float], degree: int) -> np.ndarray:
    a = np.array([[float(q_poly(k, n)) for k in range(degree + 1)] for n in ns])
    return np.linalg.solve(a, np.asarray(vals, dtype=float))


def _richardson(ns: Sequence[int], us: Sequence[float]) -> float:
    """Extrapolate u(n) = L + a/h + ... to h = 1/(n+1) -> 0 by Neville."""
    h = [1.0 / (n + 1.0) for n in ns]
    t = list(us)
    m = len(t)
    for j in range(1, m):
        for i in range(m - 1, j - 1, -1):
            t[i] = t[i] + (t[i] - t[i - 1]) * h[i] / (h[i - j] - h[i])
    return t[m - 1]


def curvature_asymptotic(model: QuotientModel, window: int | None = None) -> CurvatureEstimate:
    """K(H) from the trace asymptotics of the iterated defect operator.

    Primary route: the trailing entries of trace(phi^n(Delta^2)) fit a
    polynomial in the q-basis of degree d-1 exactly, and K is its top
    coefficient.  When the trailing residuals show the sequence is not
    polynomial (possible for mixed shifts), the limit of
    trace(phi^n(Delta^2))/q_{d-1}(n) is Richardson-extrapolated in 1/n.
    """
    d = model.d
    top = max(model.defect_degrees, default=model.n_min)
    n_levels = model.n_max - top
    if window is None:
        window = d + 2
    window = max(window, d + 2)
    if n_levels + 1 < window + 1:
        raise ModelError(
            f"need {window + 1} trace points, range allows {n_levels + 1};"
            " raise the maximum degree"
        )
    a = phi_power_traces(model, n_levels)
    scale = max(1.0, max(abs(v) for v in a))
    ns = list(range(n_levels + 1))

    def fit_tail(end: int) -> np.ndarray:
        pts = ns[end - d : end]
        return _qbasis_fit_float(pts, [a[n] for n in pts], d - 1)

    c_last = fit_tail(len(ns))
    resid = [
        abs(a[n] - sum(c_last[k] * float(q_poly(k, n)) for k in range(d)))
        for n in ns
    ]
    # an eventually-polynomial sequence matches to float roundoff; anything
    # looser is a genuine tail and goes to the extrapolation route
    run = 0
    for r in reversed(resid):
        if r <= 1e-10 * scale:
            run += 1
        else:
            break
    if run >= window:
        c_prev = fit_tail(len(ns) - 1)
        unc = abs(c_last[d - 1] - c_prev[d - 1]) + 1e-12 * scale
        return CurvatureEstimate(
            "asymptotic",
            float(c_last[d - 1]),
            float(unc),
            {
                "route": "q-basis-fit",
                "points": n_levels + 1,
                "window": window,
                "max_residual_in_run": max(resid[-run:]) if run else 0.0,
            },
        )
    # non-polynomial tail: Richardson extrapolation of a_n / q_{d-1}(n)
    u = [a[n] / float(q_poly(d - 1, n)) for n in ns]
    nodes: list[int] = []
    n = n_levels
    while n >= max(2, n_levels // 8) and len(nodes) < 7:
        nodes.append(n)
        n = int(n / 1.45)
    nodes = sorted(set(nodes))
    if len(nodes) < 3:
        raise ModelError("too few trace points for extrapolation; raise max degree")
    est = _richardson(nodes, [u[n] for n in nodes])
    est_drop = _richardson(nodes[1:], [u[n] for n in nodes[1:]])
    unc = abs(est - est_drop) + 1e-10
    return CurvatureEstimate(
        "asymptotic",
        float(est),
        float(unc),
        {"route": "richardson-1/n", "nodes": nodes, "points": n_levels + 1},
    )


# ---------------------------------------------------------------------------
# curvature: boundary values and Monte-Carlo integration
# ---------------------------------------------------------------------------


def _neumann_depth(model: QuotientModel, r: float, tail_tol: float) -> int:
    tr = max(model.trace_delta2, 1e-300)
    if r <= 0:
        return 0
    depth = math.log(tail_tol / tr) / (2.0 * math.log(r)) - 1.0
    return max(0, int(math.ceil(depth)))


def boundary_curvature_point(
    model: QuotientModel,
    zeta: Sequence[complex],
    r: float,
    tail_tol: float = 1e-9,
) -> float:
    """(1-r^2) trace F(r zeta) for a unit vector zeta, truncation-controlled.

    The Neumann depth D satisfies r^(2(D+1)) trace(Delta^2) <= tail_tol, which
    bounds the omitted part of the sum of squared norms exactly (the degree
    components of (1 - T(z))^{-1} Delta e_i are mutually orthogonal).
    """
    if model.rank == 0:
        return 0.0
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    z = np.asarray(zeta, dtype=complex)
    nrm = float(np.linalg.norm(z))
    if nrm == 0:
        raise ValueError("zeta must be nonzero")
    zbar = np.conj(r * z / nrm)
    depth = _neumann_depth(model, r, tail_tol)
    total = 0.0
    leftover = 0.0  # bound on the part cut off by the built degree range
    for n0 in model.defect_degrees:
        vecs = [
            math.sqrt(lam_sq) * v for (m, lam_sq, v) in model.defect_pairs if m == n0
        ]
        if not vecs:
            continue
        x = np.stack(vecs, axis=1)
        total += float(np.sum(np.abs(x) ** 2))
        n = n0
        steps = 0
        while steps < depth and n < model.n_max:
            x = model.apply_tz(n, x, zbar)
            n += 1
            steps += 1
            total += float(np.sum(np.abs(x) ** 2))
        if steps < depth:
            # remaining terms are bounded by the geometric series from x on
            leftover += float(np.sum(np.abs(x) ** 2)) * r * r / (1.0 - r * r)
    if leftover * (1.0 - r * r) > tail_tol:
        raise DepthError(
            f"Neumann tail {leftover * (1.0 - r * r):.2e} above {tail_tol:.2e} at the"
            " built degree range; raise max degree or lower r"
        )
    return (1.0 - r * r) * total


def sphere_samples(d: int, samples: int, seed: int) -> np.ndarray:
    """Uniform points on the unit sphere of C^d via normalized Gaussians."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((samples, d)) + 1j * rng.standard_normal((samples, d))
    z /= np.linalg.norm(z, axis=1)[:, None]
    return z


def curvature_monte_carlo(
    model: QuotientModel,
    samples: int,
    r_schedule: Sequence[float],
    seed: int = 0,
    tail_tol: float = 1e-9,
    threads: int = 1,
) -> CurvatureEstimate:
    """K(H) = integral over the sphere of K0, by Monte-Carlo.

    Per sample, K0(zeta) is estimated by affine extrapolation of
    (1-r^2) trace F(r zeta) in the variable (1-r^2) to 0 using the two
    largest scheduled radii.
    """
    rs = sorted(r_schedule)
    if not rs or any(not 0.0 < r < 1.0 for r in rs):
        raise ValueError("r_schedule must contain radii strictly inside (0,1)")
    if model.rank == 0:
        return CurvatureEstimate(
            "boundary-mc", 0.0, 0.0, {"samples": samples, "seed": seed, "r_schedule": rs}
        )
    pts = sphere_samples(model.d, samples, seed)

    def one(i: int) -> float:
        vals = [boundary_curvature_point(model, pts[i], r, tail_tol) for r in rs]
        if len(rs) == 1:
            return vals[0]
        x1, x2 = 1 - rs[-1] ** 2, 1 - rs[-2] ** 2
        v1, v2 = vals[-1], vals[-2]
        return v1 - x1 * (v2 - v1) / (x2 - x1)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            k0 = np.fromiter(ex.map(one, range(samples)), dtype=float, count=samples)
    else:
        k0 = np.fromiter((one(i) for i in range(samples)), dtype=float, count=samples)
    mean = float(k0.mean())
    stderr = float(k0.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return CurvatureEstimate(
        "boundary-mc",
        mean,
        stderr,
        {
            "samples": samples,
            "seed": seed,
            "r_schedule": rs,
            "depth": _neumann_depth(model, rs[-1], tail_tol),
            "tail_tol": tail_tol,
        },
    )


# ---------------------------------------------------------------------------
# purity and Hardy-space trace identities
# ---------------------------------------------------------------------------


def purity_check(model: QuotientModel, n_levels: int | None = None) -> dict:
    """Decay profile of phi^n(1): support starts at n_min + n and exits the window."""
    if n_levels is None:
        n_levels = model.n_max - model.n_min
    x = identity_blocks(model)
    profile = []
    pure = True
    for level in range(n_levels + 1):
        if x:
            supp = min(x)
            norm = max(float(np.linalg.norm(b, 2)) for b in x.values())
            # support of phi^n(1) must have climbed to n_min + n, with
            # contractions all the way (norm <= 1 up to roundoff)
            pure = pure and supp == model.n_min + level and norm <= 1.0 + 1e-9
        else:
            supp, norm = None, 0.0
        profile.append({"n": level, "support_start": supp, "max_block_norm": norm})
        x, _ = phi_apply(model, x)
    return {"pure": pure, "profile": profile}


def hardy_norm_sq(alpha: Sequence[int]):
    """Exact squared H^2(sphere) norm of z^alpha.

    Computed from the classical sphere integral
        int |zeta^alpha|^2 dsigma = (d-1)! alpha! / (d-1+|alpha|)!,
    independent of the Fock weights (whose rescaling by q_{d-1}(|alpha|) it
    must reproduce).
    """
    alpha = tuple(alpha)
    d = len(alpha)
    num = math.factorial(d - 1)
    for a in alpha:
        num *= math.factorial(a)
    return Fraction(num, math.factorial(d - 1 + sum(alpha)))


def hardy_trace_identity(
    model: QuotientModel, x: BlockOperator, n: int
) -> tuple[float, float]:
    """Both sides of the partial-trace identity for the curvature operator.

    lhs = trace(dGamma(X) restricted to Hardy degrees <= n),
    rhs = rank * trace(X E_n) / trace(E_n);
    the two agree exactly degree by degree on a free module.
    """
    if any(not g.is_zero() for g in model.pres.generators):
        raise ModelError("hardy_trace_identity needs a free-module model")
    d = model.d
    r = model.spec.rank
    if not 0 <= n < model.n_max:
        raise ValueError("n out of built range")

    def qd(m: int) -> float:
        return float(q_poly(d - 1, m))

    def gamma_block(m: int) -> np.ndarray:
        blk = x.get(m)
        if blk is None:
            return np.zeros((model.dim[m], model.dim[m]), dtype=complex)
        return np.asarray(blk, dtype=complex) / qd(m)

    lhs = 0.0
    for m in range(0, n + 1):
        lhs += float(np.trace(gamma_block(m)).real)
        if m >= 1:
            g_prev = gamma_block(m - 1)
            scale = qd(m - 1) / qd(m)
            for k in range(d):
                t = model.T(k, m - 1)
                lhs -= scale * float(np.trace(t @ g_prev @ t.conj().T).real)
    blk = x.get(n)
    tr_x = float(np.trace(blk).real) if blk is not None else 0.0
    rhs = r * tr_x / (qd(n) * r)
    return lhs, rhs
