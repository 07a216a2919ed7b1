"""k-sweeps of fundamental-solution approximations and their classification.

A sweep solves the same problem for a ladder of initial masses k and
records probe values u_k(x0, t0) against the flat supersolution.  The
classifier turns the recorded trends into a complete / single-point /
inconclusive verdict using documented thresholds; it reproduces the
direction of the continuous dichotomy at desk scale, it does not prove
it.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ComparisonViolation,
    DiffabsError,
    DomainError,
    IncompleteSweepError,
)
from .kernels import (
    ProblemSpec,
    dini_classify,
    eval_U,
    eval_Utilde,
    theta_exponent,
)
from . import rdsolver
from .rdsolver import InitialData, RadialGrid, SolverOptions, probe, solve

__all__ = ["SweepTable", "Verdict", "DEFAULT_THRESHOLDS",
           "sweep", "classify", "porous_sweep"]

DEFAULT_THRESHOLDS = {"growth": 0.05, "saturation": 0.01}


@dataclass(frozen=True)
class SweepTable:
    spec: ProblemSpec
    probes: tuple  # ((x0, t0), ...)
    ks: np.ndarray
    values: np.ndarray  # shape (len(ks), len(probes))
    supersolution: np.ndarray  # U(t0) resp. Utilde(t0) per probe (may be inf)
    diagnostics: tuple  # per-k solver diagnostics dicts
    origin_cell: float  # first face radius: probes inside count as on-origin
    complete: bool = True
    failure: str | None = None


@dataclass(frozen=True)
class Verdict:
    verdict: str  # "complete" | "single-point" | "inconclusive"
    increments: np.ndarray  # last-decade relative increment per probe
    top_ratio: np.ndarray  # value / supersolution at the top of the ladder
    ratio_increasing: bool
    dini: str  # cross-reference classification of the kernel
    thresholds: dict


def _solve_one(args):
    spec, init, grid, opts, snaps = args
    return solve(spec, init, grid, opts, snaps)


def _supersolution_value(spec, t0):
    if spec.variant == "exponential":
        return eval_Utilde(spec, t0)
    val = eval_U(spec, t0)
    # divergent H makes the flat supersolution identically zero: the bound
    # is vacuous (no fundamental solution in the continuous theory), so it
    # carries no information and is recorded as +inf
    return math.inf if val == 0.0 else val


def _dini_crossref(spec):
    if spec is None:
        return "n/a"
    omega = getattr(spec.kernel, "omega", None)
    if omega is None:
        return "n/a"
    if spec.variant == "porous":
        expo = theta_exponent(spec.m, spec.q, spec.N)
    else:
        expo = 0.5
    return dini_classify(omega, expo).kind


def _check_exponential_admissible(spec):
    """Initial-mass existence check: t^{N/2} (-ln h(t)) must blow up as t->0."""
    ts = np.geomspace(1e-3, 1e-8, 6)
    vals = [t ** (spec.N / 2.0) * (-spec.kernel.log_h(t)) for t in ts]
    if not (all(b > a for a, b in zip(vals, vals[1:])) and vals[-1] > 1e2):
        raise DomainError(
            "kernel fails the existence condition t^{N/2}(-ln h) -> infinity; "
            "sweep refused"
        )


def sweep(spec: ProblemSpec, probes, ks, grid: RadialGrid,
          opts: SolverOptions | None = None, t0_init: float = 1e-3,
          workers: int | None = None) -> SweepTable:
    """One solve per ladder mass k; probe values assembled in ladder order.

    The top-of-ladder run drives the adaptive step schedule and every
    other run replays it, so the recorded columns inherit the discrete
    comparison principle substep by substep.  Worker count comes from
    DIFFABS_WORKERS when not passed (default 1).
    """
    ks = np.asarray(sorted(float(k) for k in ks))
    if ks.size < 2 or np.any(np.diff(ks) <= 0):
        raise DomainError("ladder must be increasing with at least two rungs")
    probes = tuple((float(x), float(t)) for x, t in probes)
    for x0, t0 in probes:
        if not 0.0 < t0 < spec.T:
            raise DomainError("probe times must lie in (0, T)")
    if spec.variant == "exponential":
        _check_exponential_admissible(spec)
    if opts is None:
        opts = SolverOptions()
    if workers is None:
        workers = int(os.environ.get("DIFFABS_WORKERS", "1"))

    snaps = sorted({t for _, t in probes} | {spec.T})
    inits = [InitialData("warm-start", k=k, t0=t0_init) for k in ks]
    results = [None] * ks.size
    failure = None
    try:
        results[-1] = solve(spec, inits[-1], grid, opts, snaps)
        opts_replay = SolverOptions(
            **{**opts.__dict__, "fixed_steps": results[-1].accepted_steps}
        )
        jobs = [(spec, init, grid, opts_replay, snaps) for init in inits[:-1]]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results[:-1] = list(pool.map(_solve_one, jobs))
        else:
            results[:-1] = [_solve_one(j) for j in jobs]
    except DiffabsError as exc:
        failure = f"{type(exc).__name__}: {exc}"

    done = [r for r in results if r is not None]
    values = np.full((ks.size, len(probes)), np.nan)
    for i, res in enumerate(results):
        if res is None:
            continue
        for j, (x0, t0) in enumerate(probes):
            values[i, j] = probe(res, x0, t0)
    sup = np.array([_supersolution_value(spec, t0) for _, t0 in probes])
    diags = tuple(r.diagnostics if r is not None else {} for r in results)

    table = SweepTable(
        spec=spec, probes=probes, ks=ks, values=values,
        supersolution=sup, diagnostics=diags,
        origin_cell=float(grid.faces[1]),
        complete=failure is None, failure=failure,
    )
    if failure is None:
        scale = np.maximum(1.0, np.abs(values[:-1]))
        if np.any(values[1:] - values[:-1] < -1e-8 * scale):
            raise ComparisonViolation(
                "probe columns are not nondecreasing along the ladder"
            )
    return table


def classify(table: SweepTable, thresholds: dict | None = None) -> Verdict:
    """Trend verdict from a completed sweep table.

    complete: every probe's last-decade relative increment >= growth
    threshold and the ratio to the (finite) supersolution increases
    across decades; when the supersolution is infinite the growth
    condition alone decides.  single-point: every off-origin probe
    saturates (increment <= saturation threshold); an on-origin probe,
    when present, must still be growing.  Anything else is inconclusive.
    """
    if not table.complete:
        raise IncompleteSweepError(table.failure or "sweep incomplete")
    if table.ks.size < 4:
        raise DomainError("ladder too short to classify (need >= 4 rungs)")
    th = dict(DEFAULT_THRESHOLDS, **(thresholds or {}))
    v = table.values
    inc = (v[-1] - v[-2]) / np.maximum(np.abs(v[-2]), 1e-300)
    finite_sup = np.isfinite(table.supersolution)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = v / table.supersolution
    top_ratio = np.where(finite_sup, ratios[-1], np.inf)
    if np.any(finite_sup):
        rcols = ratios[:, finite_sup]
        ratio_increasing = bool(np.all(np.diff(rcols, axis=0) > -1e-12))
    else:
        ratio_increasing = True

    on_origin = np.array([x0 <= table.origin_cell for x0, _ in table.probes])
    off = ~on_origin

    growing = bool(np.all(inc >= th["growth"]))
    saturated_off = bool(np.all(inc[off] <= th["saturation"])) if np.any(off) else False
    origin_growing = (
        bool(np.all(inc[on_origin] >= th["growth"])) if np.any(on_origin) else True
    )

    if growing and ratio_increasing:
        verdict = "complete"
    elif saturated_off and origin_growing:
        verdict = "single-point"
    else:
        verdict = "inconclusive"

    dini = _dini_crossref(table.spec)
    return Verdict(
        verdict=verdict, increments=inc, top_ratio=top_ratio,
        ratio_increasing=ratio_increasing, dini=dini, thresholds=th,
    )


def porous_sweep(spec: ProblemSpec, probes, ks, grid: RadialGrid,
                 opts: SolverOptions | None = None, t0_init: float = 1e-3,
                 workers: int | None = None) -> SweepTable:
    """Sweep for the degenerate-diffusion equation; q > m > 1 required."""
    if spec.variant != "porous":
        raise DomainError("porous_sweep requires the porous variant")
    if not spec.q > spec.m > 1.0:
        raise DomainError("porous sweep requires q > m > 1")
    if spec.kernel.family not in ("porous-threshold", "power"):
        raise DomainError(
            "porous sweep expects a porous-threshold or pure power kernel"
        )
    return sweep(spec, probes, ks, grid, opts, t0_init=t0_init, workers=workers)
