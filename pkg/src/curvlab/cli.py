"""Command-line interface: invariants | curvature | metric-basis | verify | examples.

Module specs are JSON files ({"d", "rank", "shifts", "generators"}); the
built-in registry names are accepted wherever a path is, and
``curvlab examples show NAME`` prints the equivalent JSON.

Reports are deterministic: given the same input, flags and seed the JSON
output is byte-identical (keys sorted, fixed float repr).  Wall-clock timing
therefore goes to stderr and to the text rendering only, never into the JSON
body.

Exit codes: 0 success, 1 input error, 2 sequence not stabilized at the
requested degree, 3 numeric or property failure.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import registry
from .hilbert import (
    NotStabilized,
    RankSequence,
    cumulate,
    fit_hilbert_polynomial,
    generating_function,
)
from .metricbasis import (
    FrameMismatch,
    build_submodule_model,
    codimension_report,
    frame_residual,
    inner_sequence_profile,
    metric_basis,
)
from .oplab import (
    DepthError,
    ModelError,
    build_quotient_model,
    curvature_asymptotic,
    curvature_monte_carlo,
    defect_sum_sequence,
    purity_check,
)
from .polycore import Polynomial, evaluate_exact, fock_inner, gr, monomials, szego_truncate
from .presentation import (
    GradedPresentation,
    PresentationError,
    defect_degrees_exact,
    defect_filtration_dims,
    presentation_from_dict,
    quotient_dims,
    validate,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_STABILIZED = 2
EXIT_NUMERIC = 3


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    input: str
    max_degree: int = 12
    tolerance: float = 1e-8
    samples: int = 100
    r_schedule: tuple[float, ...] = (0.9, 0.99)
    seed: int = 0
    method: str = "asymptotic"
    output: str = "text"
    threads: int = 1

    def validate_against(self, d: int, needs_model: bool = False) -> None:
        if self.max_degree < 1:
            raise InputError("--max-degree must be positive")
        if needs_model and self.max_degree < d + 2:
            # the trace fit needs d+3 points, i.e. degrees up to d+2
            raise InputError(f"--max-degree must be at least d + 2 = {d + 2}")
        rs = self.r_schedule
        if any(not 0.0 < r < 1.0 for r in rs) or list(rs) != sorted(set(rs)):
            raise InputError("--r-schedule must be strictly increasing inside (0,1)")

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "input": self.input,
            "max_degree": self.max_degree,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "r_schedule": list(self.r_schedule),
            "seed": self.seed,
            "method": self.method,
            "threads": self.threads,
        }


def default_threads() -> int:
    env = os.environ.get("CURVLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def load_presentation(ref: str) -> tuple[GradedPresentation, dict]:
    """Resolve a path or registry name into a validated presentation."""
    if os.path.exists(ref):
        try:
            with open(ref, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"cannot parse {ref}: line {exc.lineno} col {exc.colno}: {exc.msg}")
    else:
        try:
            data = registry.spec_dict(ref)
        except KeyError:
            raise InputError(f"{ref!r} is neither a file nor a built-in fixture name")
    try:
        pres = presentation_from_dict(data)
    except (PresentationError, ValueError) as exc:
        raise InputError(str(exc))
    report = validate(pres)
    if not report.ok:
        raise InputError("; ".join(report.errors))
    return pres, data


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


def _dims_payload(table) -> dict:
    return {
        "n_min": table.n_min,
        "n_max": table.n_max,
        "dims_F": [table.dims_F[n] for n in range(table.n_min, table.n_max + 1)],
        "dims_M": [table.dims_M[n] for n in range(table.n_min, table.n_max + 1)],
        "dims_H": [table.dims_H[n] for n in range(table.n_min, table.n_max + 1)],
        "exact": table.exact,
    }


def run_invariants(cfg: RunConfig) -> dict:
    pres, data = load_presentation(cfg.input)
    cfg.validate_against(pres.d)
    rng = random.Random(cfg.seed)
    table = quotient_dims(pres, cfg.max_degree, rng=rng, threads=cfg.threads)
    seq = cumulate(RankSequence(table.n_min, tuple(table.h_values())))
    profile = fit_hilbert_polynomial(seq, pres.d)
    gf = generating_function(profile, seq)
    defect_degs = defect_degrees_exact(pres, rng=rng)
    payload = profile.to_dict()
    # chi/deg/mu are filtration-independent; the full c-vector and transient
    # are canonical only when the defect sits in one degree
    payload["c_vector_canonical"] = len(defect_degs) <= 1
    return {
        "input": data,
        "config": cfg.to_dict(),
        "dims": _dims_payload(table),
        "defect_degrees": defect_degs,
        "profile": payload,
        "generating_function": {"text": str(gf), **gf.to_dict()},
    }


def run_curvature(cfg: RunConfig) -> dict:
    pres, data = load_presentation(cfg.input)
    cfg.validate_against(pres.d, needs_model=True)
    rng = random.Random(cfg.seed)
    table = quotient_dims(pres, cfg.max_degree, rng=rng, threads=cfg.threads)
    model = build_quotient_model(pres, cfg.max_degree, table=table, threads=cfg.threads)
    estimates = [curvature_asymptotic(model)]
    if cfg.method in ("boundary", "both"):
        estimates.append(
            curvature_monte_carlo(
                model,
                cfg.samples,
                cfg.r_schedule,
                seed=cfg.seed,
                tail_tol=cfg.tolerance,
                threads=cfg.threads,
            )
        )
    seq = cumulate(RankSequence(table.n_min, tuple(table.h_values())))
    profile = fit_hilbert_polynomial(seq, pres.d)
    chi = float(profile.chi)
    residual = abs(estimates[0].value - chi)
    return {
        "input": data,
        "config": cfg.to_dict(),
        "rank": model.rank,
        "chi_exact": str(profile.chi),
        "curvature": [e.to_dict() for e in estimates],
        "gauss_bonnet_residual": residual,
    }


def _interior_points(d: int, count: int, radius: float, seed: int) -> list[tuple[complex, ...]]:
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        z /= np.linalg.norm(z)
        r = radius * float(rng.random()) ** (1.0 / (2 * d))
        pts.append(tuple(r * z))
    return pts


def run_metric_basis(cfg: RunConfig) -> dict:
    pres, data = load_presentation(cfg.input)
    cfg.validate_against(pres.d)
    if not pres.is_plain_ideal():
        raise InputError("metric-basis needs a rank-1, shift-0 ideal spec")
    model = build_submodule_model(pres, cfg.max_degree)
    basis = metric_basis(model)
    residuals = {n: frame_residual(basis, model, n) for n in range(cfg.max_degree + 1)}
    pts = _interior_points(pres.d, min(cfg.samples, 25), 0.7, cfg.seed)
    profile_rows = inner_sequence_profile(basis, model, pts, cfg.max_degree)
    codim = codimension_report(pres, cfg.max_degree, table=model.table, basis=basis)
    return {
        "input": data,
        "config": cfg.to_dict(),
        "basis": {
            "counts": {str(n): c for n, c in sorted(basis.counts.items())},
            "elements": [el.to_dict() for el in basis.elements],
            "cutoff": basis.cutoff,
        },
        "frame_residuals": {str(n): residuals[n] for n in sorted(residuals)},
        "inner_profile": [row.to_dict() for row in profile_rows],
        "codimension": codim,
    }


def _kernel_oracle_check(seed: int, trials: int = 20) -> tuple[bool, str]:
    rng = random.Random(seed)
    for _ in range(trials):
        d = rng.randint(1, 3)
        deg = rng.randint(0, 4)
        terms = {}
        for alpha in monomials(d, deg):
            if rng.random() < 0.5:
                terms[alpha] = gr(rng.randint(-3, 3), rng.randint(-2, 2))
        f = Polynomial(d, terms)
        w = tuple(gr(Fraction(rng.randint(-2, 2), 8), Fraction(rng.randint(-2, 2), 8)) for _ in range(d))
        if float(sum(c.abs_sq() for c in w)) >= 1.0:
            continue
        lhs = fock_inner(f, szego_truncate(w, max(deg, 0)))
        rhs = evaluate_exact(f, w)
        if not (lhs - rhs).is_zero():
            return False, f"kernel oracle mismatch at d={d}"
    return True, "exact on all sampled polynomials"


def run_verify(cfg: RunConfig) -> dict:
    pres, data = load_presentation(cfg.input)
    cfg.validate_against(pres.d, needs_model=True)
    rng = random.Random(cfg.seed)
    checks: list[dict] = []

    def record(name: str, passed: bool, detail: str):
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    ok, detail = _kernel_oracle_check(cfg.seed)
    record("reproducing-kernel-oracle", ok, detail)

    table = quotient_dims(pres, cfg.max_degree, rng=rng, threads=cfg.threads)
    model = build_quotient_model(pres, cfg.max_degree, table=table, threads=cfg.threads)
    record(
        "orthonormality",
        model.diagnostics["gram_residual"] <= 1e-10,
        f"gram residual {model.diagnostics['gram_residual']:.2e}",
    )

    top = max(model.defect_degrees, default=model.n_min)
    levels = min(8, cfg.max_degree - top)
    sums = defect_sum_sequence(model, levels)
    exact_filtration = defect_filtration_dims(pres, levels, table=table, rng=rng)
    bridge_ok = sums.rank_seq == exact_filtration
    record(
        "filtration-rank-bridge",
        bridge_ok,
        f"rank(S_n) {sums.rank_seq} vs exact {exact_filtration}",
    )

    seq = cumulate(RankSequence(table.n_min, tuple(table.h_values())))
    profile = fit_hilbert_polynomial(seq, pres.d)
    est = curvature_asymptotic(model)
    gb = abs(est.value - float(profile.chi))
    record("gauss-bonnet", gb <= 1e-5, f"|K - chi| = {gb:.2e}")

    chi = float(profile.chi)
    sandwich = -cfg.tolerance <= est.value <= chi + max(1e-5, est.uncertainty) and chi <= model.rank
    record(
        "sandwich",
        sandwich,
        f"0 <= K={est.value:.6f} <= chi={chi} <= rank={model.rank}",
    )

    pur = purity_check(model)
    record(
        "purity",
        pur["pure"],
        "phi^n(1) supported on degrees >= n_min + n, norms <= 1",
    )

    if pres.is_plain_ideal() and pres.generators:
        smodel = build_submodule_model(pres, min(cfg.max_degree, 10), table=table)
        sbasis = metric_basis(smodel)
        worst = max(
            frame_residual(sbasis, smodel, n) for n in range(smodel.n_max + 1)
        )
        record("frame-identity", worst <= 1e-8, f"max residual {worst:.2e}")

    return {
        "input": data,
        "config": cfg.to_dict(),
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks),
    }


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def render_text(report: dict, elapsed: float) -> str:
    lines: list[str] = []
    cfg = report.get("config", {})
    lines.append(f"curvlab {cfg.get('command', '')} {cfg.get('input', '')}")
    if "dims" in report:
        dims = report["dims"]
        lines.append(f"degrees {dims['n_min']}..{dims['n_max']}  (exact={dims['exact']})")
        lines.append("  n     dim F   dim M   dim H")
        for i, n in enumerate(range(dims["n_min"], dims["n_max"] + 1)):
            lines.append(
                f"  {n:<5} {dims['dims_F'][i]:<7} {dims['dims_M'][i]:<7} {dims['dims_H'][i]:<7}"
            )
    if "profile" in report:
        p = report["profile"]
        lines.append(
            f"c = ({', '.join(p['c'])})  chi = {p['chi']}  deg = {p['degree']}  mu = {p['mu']}"
        )
        lines.append(f"stabilized at n = {p['stabilized_at']}; filtration = {p['filtration']}")
    if "generating_function" in report:
        lines.append(f"generating function: {report['generating_function']['text']}")
    if "curvature" in report:
        lines.append(f"rank = {report['rank']}   chi = {report['chi_exact']}")
        for e in report["curvature"]:
            lines.append(
                f"K[{e['method']}] = {e['value']:.9f} +/- {e['uncertainty']:.2e}"
            )
        lines.append(f"Gauss-Bonnet residual |K - chi| = {report['gauss_bonnet_residual']:.2e}")
    if "basis" in report:
        counts = report["basis"]["counts"]
        lines.append(f"metric basis counts by degree: {counts}")
        worst = max(report["frame_residuals"].values()) if report["frame_residuals"] else 0.0
        lines.append(f"worst frame residual: {worst:.2e}")
        lines.append(f"codimension: {report['codimension']['verdict']}")
        bad = [r for r in report["inner_profile"] if r["residual"] > r["tail_bound"] + 1e-12]
        lines.append(
            f"inner-sequence identity: {len(report['inner_profile']) - len(bad)}/"
            f"{len(report['inner_profile'])} points within tail bound"
        )
    if "checks" in report:
        for c in report["checks"]:
            lines.append(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}: {c['detail']}")
        lines.append("all passed" if report["all_passed"] else "FAILURES PRESENT")
    lines.append(f"elapsed: {elapsed:.2f}s")
    return "\n".join(lines)


def emit(report: dict, cfg: RunConfig, elapsed: float) -> None:
    if cfg.output == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
        print(f"elapsed: {elapsed:.2f}s", file=sys.stderr)
    else:
        print(render_text(report, elapsed))


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="module-spec JSON path or built-in fixture name")
    p.add_argument("--max-degree", type=int, default=12)
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--r-schedule", type=str, default="0.9,0.99")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=["asymptotic", "boundary", "both"], default="asymptotic")
    p.add_argument("--output", choices=["text", "json"], default="text")
    p.add_argument("--threads", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="curvlab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("invariants", "curvature", "metric-basis", "verify"):
        _add_common(sub.add_parser(name))
    ex = sub.add_parser("examples")
    ex.add_argument("action", choices=["list", "show"])
    ex.add_argument("name", nargs="?")
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    try:
        schedule = tuple(float(x) for x in args.r_schedule.split(",") if x.strip())
    except ValueError:
        raise InputError(f"cannot parse --r-schedule {args.r_schedule!r}")
    return RunConfig(
        command=args.command,
        input=args.input,
        max_degree=args.max_degree,
        tolerance=args.tolerance,
        samples=args.samples,
        r_schedule=schedule,
        seed=args.seed,
        method=args.method,
        output=args.output,
        threads=args.threads if args.threads else default_threads(),
    )


RUNNERS = {
    "invariants": run_invariants,
    "curvature": run_curvature,
    "metric-basis": run_metric_basis,
    "verify": run_verify,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "examples":
        if args.action == "list":
            for name in registry.names():
                print(name)
            return EXIT_OK
        if not args.name:
            print("examples show requires a fixture name", file=sys.stderr)
            return EXIT_INPUT
        try:
            print(registry.spec_json(args.name))
            return EXIT_OK
        except KeyError as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_INPUT
    try:
        cfg = config_from_args(args)
        t0 = time.perf_counter()
        report = RUNNERS[args.command](cfg)
        elapsed = time.perf_counter() - t0
    except (InputError, PresentationError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotStabilized as exc:
        print(f"not stabilized: {exc}", file=sys.stderr)
        return EXIT_NOT_STABILIZED
    except (ModelError, DepthError, FrameMismatch) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    emit(report, cfg, elapsed)
    if args.command == "verify" and not report["all_passed"]:
        failing = next(c["name"] for c in report["checks"] if not c["passed"])
        print(f"verify failed at: {failing}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
