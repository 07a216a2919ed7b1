"""Command-line front end: configuration, orchestration and reporting.

Every subcommand reads an optional `key = value` config file, applies
command-line overrides, runs the corresponding library operation, and
writes a versioned manifest next to its CSV/JSON (and optional SVG)
outputs.  Exit codes: 0 success, 2 configuration error, 3 numerical
failure, 4 incomplete sweep.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, config as configmod, dichotomy, energy, kernels, rdsolver
from . import selfsimilar
from .errors import (
    DiffabsError,
    DomainError,
    IncompleteSweepError,
)

_MANIFEST_SCHEMA = 1


# ---------------------------------------------------------------------------
# descriptor parsing
# ---------------------------------------------------------------------------

def parse_omega(text: str) -> kernels.OmegaSpec:
    """Parse "family:key=value,..." e.g. "power:a=1,alpha=0.5"."""
    family, _, rest = text.partition(":")
    family = family.strip()
    kw = {}
    if rest.strip():
        for item in rest.split(","):
            if "=" not in item:
                raise DomainError(f"bad omega field {item!r}")
            k, _, v = item.partition("=")
            k = k.strip()
            if k == "path":
                kw[k] = v.strip()
            else:
                kw[k] = float(v)
    if family == "constant":
        return kernels.OmegaSpec("constant", sigma=kw.get("sigma", 1.0))
    if family == "power":
        return kernels.OmegaSpec("power", a=kw.get("a", 1.0),
                                 alpha=kw.get("alpha", 1.0))
    if family == "tabulated":
        data = np.loadtxt(kw["path"], delimiter=",")
        return kernels.OmegaSpec("tabulated", table_t=data[:, 0],
                                 table_v=data[:, 1])
    raise DomainError(f"unknown omega family {family!r}")


def build_kernel(cfg: dict) -> kernels.AbsorptionKernel:
    family = cfg.get("kernel.family", "constant")
    if family in ("exp-omega", "double-exp"):
        om = parse_omega(cfg["kernel.omega"])
        ctor = (kernels.AbsorptionKernel.exp_omega if family == "exp-omega"
                else kernels.AbsorptionKernel.double_exp)
        return ctor(om)
    if family == "lemma1":
        return kernels.AbsorptionKernel.lemma1_kernel(float(cfg.get("kernel.sigma", 1.0)))
    if family == "porous-threshold":
        om = parse_omega(cfg["kernel.omega"])
        return kernels.AbsorptionKernel.porous_threshold(
            float(cfg.get("problem.m", 2.0)), float(cfg.get("problem.q", 3.0)), om)
    if family == "constant":
        return kernels.AbsorptionKernel.constant(float(cfg.get("kernel.value", 1.0)))
    if family == "power":
        return kernels.AbsorptionKernel.power(
            float(cfg.get("kernel.coeff", 1.0)), float(cfg.get("kernel.expo", 1.0)))
    if family == "tabulated":
        return kernels.AbsorptionKernel.from_csv(cfg["kernel.path"])
    raise DomainError(f"unknown kernel family {family!r}")


def build_problem(cfg: dict) -> kernels.ProblemSpec:
    kern = build_kernel(cfg)
    return kernels.ProblemSpec(
        N=int(cfg.get("problem.N", 1)),
        variant=cfg.get("problem.variant", "power"),
        kernel=kern,
        q=float(cfg.get("problem.q", 2.0)),
        m=float(cfg.get("problem.m", 2.0)),
        R=float(cfg.get("problem.R", 4.0)),
        T=float(cfg.get("problem.T", 0.1)),
    )


def build_grid(cfg: dict, spec) -> rdsolver.RadialGrid:
    return rdsolver.RadialGrid.graded(
        spec.R,
        int(cfg.get("grid.M", 220)),
        spec.N,
        stretch=float(cfg.get("grid.stretch", 1.02)),
    )


def build_init(cfg: dict) -> rdsolver.InitialData:
    kind = cfg.get("init.kind", "warm-start")
    return rdsolver.InitialData(
        kind,
        k=float(cfg.get("init.k", 1.0)),
        t0=float(cfg.get("init.t0", 1e-3)),
        Mk=float(cfg.get("init.Mk", 1.0)),
        A=float(cfg.get("init.A", 1.0)),
    )


def build_opts(cfg: dict) -> rdsolver.SolverOptions:
    return rdsolver.SolverOptions(
        theta=float(cfg.get("solver.theta", 1.0)),
        rtol=float(cfg.get("solver.rtol", 1e-6)),
        atol=float(cfg.get("solver.atol", 1e-10)),
        max_steps=int(cfg.get("solver.max_steps", 500000)),
        monitor=bool(cfg.get("solver.monitor", True)),
    )


def _floats(text: str):
    return [float(x) for x in str(text).split(",") if str(x).strip()]


def _probes(text: str):
    out = []
    for item in str(text).split(","):
        x, _, t = item.partition(":")
        out.append((float(x), float(t)))
    return out


def _ladder(text: str):
    """"lo:hi:n" geometric, or an explicit comma list."""
    s = str(text)
    if ":" in s:
        lo, hi, n = s.split(":")
        return list(np.geomspace(float(lo), float(hi), int(n)))
    return _floats(s)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def write_json(path: Path, payload):
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        return str(o)

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, default=default)
        fh.write("\n")
    return path


class _Runner:
    """Collects outputs and writes the manifest at the end of a command."""

    def __init__(self, cfg, subcommand):
        self.cfg = cfg
        self.subcommand = subcommand
        self.outdir = Path(cfg.get("output.dir", "."))
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.written = []
        self.t0 = time.time()

    def path(self, name):
        return self.outdir / name

    def csv(self, name, header, rows):
        self.written.append(str(write_csv(self.path(name), header, rows)))

    def json(self, name, payload):
        self.written.append(str(write_json(self.path(name), payload)))

    def svg(self, name, fig):
        from . import plots

        self.written.append(str(plots.save_svg(fig, self.path(name))))

    def finish(self):
        import scipy

        manifest = {
            "schema": _MANIFEST_SCHEMA,
            "subcommand": self.subcommand,
            "config": {k: self.cfg[k] for k in sorted(self.cfg)},
            "versions": {
                "python": sys.version.split()[0],
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "diffabs": __version__,
            },
            "wall_time_s": round(time.time() - self.t0, 3),
            "outputs": self.written,
        }
        write_json(self.path("manifest.json"), manifest)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

PRESETS = {
    "heat-kernel-check": {
        "problem.variant": "power",
        "problem.N": 1,
        "problem.q": 2.0,
        "problem.R": 1.9,
        "problem.T": 0.1,
        "kernel.family": "constant",
        "kernel.value": 0.0,
        "grid.M": 240,
        "grid.stretch": 1.02,
        "init.kind": "warm-start",
        "init.k": 1.0,
        "init.t0": 0.01,
        "solve.snapshots": "0.05,0.1",
    },
    "dichotomy-divergent": {
        "problem.variant": "power",
        "problem.N": 1,
        "problem.q": 2.0,
        "problem.R": 4.0,
        "problem.T": 0.06,
        "kernel.family": "exp-omega",
        "kernel.omega": "constant:sigma=1",
        "grid.M": 220,
        "grid.stretch": 1.03,
        "sweep.probes": "0.5:0.05,1.0:0.05",
        "sweep.ladder": "1e1:1e6:6",
    },
    "dichotomy-dini": {
        "problem.variant": "power",
        "problem.N": 1,
        "problem.q": 2.0,
        "problem.R": 4.0,
        "problem.T": 0.06,
        "kernel.family": "exp-omega",
        "kernel.omega": "power:a=1,alpha=0.5",
        "grid.M": 220,
        "grid.stretch": 1.03,
        "sweep.probes": "0.5:0.05,1.0:0.05",
        "sweep.ladder": "1e1:1e6:6",
    },
}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cfg_from(args, keymap):
    cfg = {}
    if getattr(args, "preset", None):
        if args.preset not in PRESETS:
            raise DomainError(f"unknown preset {args.preset!r}")
        cfg.update(PRESETS[args.preset])
    if getattr(args, "config", None):
        cfg.update(configmod.load(args.config))
    cfg = configmod.merge(
        cfg, {key: getattr(args, attr) for attr, key in keymap.items()}
    )
    return cfg


_PROBLEM_KEYS = {
    "variant": "problem.variant", "N": "problem.N", "q": "problem.q",
    "m": "problem.m", "R": "problem.R", "T": "problem.T",
    "kernel": "kernel.family", "omega": "kernel.omega",
    "sigma": "kernel.sigma", "value": "kernel.value",
    "coeff": "kernel.coeff", "expo": "kernel.expo",
    "grid_M": "grid.M", "grid_stretch": "grid.stretch",
    "init": "init.kind", "k": "init.k", "t0": "init.t0",
    "A": "init.A", "Mk": "init.Mk",
    "rtol": "solver.rtol", "atol": "solver.atol", "theta": "solver.theta",
    "monitor": "solver.monitor", "outdir": "output.dir",
}


def _add_problem_flags(p):
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--preset", help="named built-in configuration")
    p.add_argument("--variant", choices=["power", "exponential", "porous",
                                         "power-plus-one"])
    p.add_argument("--N", type=int)
    p.add_argument("--q", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--R", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--kernel", help="kernel family tag")
    p.add_argument("--omega", help='omega descriptor, e.g. "power:a=1,alpha=0.5"')
    p.add_argument("--sigma", type=float)
    p.add_argument("--value", type=float)
    p.add_argument("--coeff", type=float)
    p.add_argument("--expo", type=float)
    p.add_argument("--grid-M", dest="grid_M", type=int)
    p.add_argument("--grid-stretch", dest="grid_stretch", type=float)
    p.add_argument("--init", choices=["warm-start", "bump", "flat", "samples"])
    p.add_argument("--k", type=float)
    p.add_argument("--t0", type=float)
    p.add_argument("--A", type=float)
    p.add_argument("--Mk", type=float)
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--monitor", type=lambda s: s.lower() == "true")
    p.add_argument("--out", dest="outdir", default=None)
    p.add_argument("--plot", action="store_true")


def cmd_solve(args):
    keys = dict(_PROBLEM_KEYS, snapshots="solve.snapshots")
    cfg = _cfg_from(args, keys)
    spec = build_problem(cfg)
    grid = build_grid(cfg, spec)
    init = build_init(cfg)
    snaps = _floats(cfg.get("solve.snapshots", "")) or None
    runner = _Runner(cfg, "solve")
    res = rdsolver.solve(spec, init, grid, build_opts(cfg), snapshots=snaps)
    header = ["r"] + [f"t={t:g}" for t in res.times]
    rows = [[r] + [res.fields[i][j] for i in range(len(res.times))]
            for j, r in enumerate(grid.r)]
    runner.csv("snapshots.csv", header, rows)
    runner.json("diagnostics.json", res.diagnostics)
    if args.plot:
        from . import plots

        runner.svg("solve.svg", plots.snapshot_figure(res))
    runner.finish()
    return 0


def cmd_profile(args):
    cfg = _cfg_from(args, {"N": "profile.N", "ell": "profile.ell",
                           "eta_max": "profile.eta_max",
                           "tolerance": "profile.tolerance",
                           "outdir": "output.dir"})
    runner = _Runner(cfg, "profile")
    prof = selfsimilar.find_profile(
        int(cfg.get("profile.N", 1)), float(cfg["profile.ell"]),
        tolerance=float(cfg.get("profile.tolerance", 1e-12)),
        eta_max=float(cfg.get("profile.eta_max", 20.0)))
    runner.csv("profile.csv", ["eta", "f", "fp"],
               zip(prof.eta, prof.f, prof.fp))
    runner.json("profile.json", {
        "N": prof.N, "ell": prof.ell, "amplitude": prof.amplitude,
        "tail_C": prof.tail_C, "tail_p": prof.tail_p,
        "delta_fit": prof.delta_fit,
    })
    if args.plot:
        from . import plots

        runner.svg("profile.svg", plots.profile_figure([prof]))
    runner.finish()
    return 0


def _run_sweep(cfg):
    spec = build_problem(cfg)
    grid = build_grid(cfg, spec)
    probes = _probes(cfg["sweep.probes"])
    ladder = _ladder(cfg["sweep.ladder"])
    opts = build_opts(cfg)
    t0_init = float(cfg.get("init.t0", 1e-3))
    fn = dichotomy.porous_sweep if spec.variant == "porous" else dichotomy.sweep
    return fn(spec, probes, ladder, grid, opts, t0_init=t0_init)


def _emit_sweep(runner, table, cfg):
    header = ["k"] + [f"x={x:g};t={t:g}" for x, t in table.probes]
    rows = [[k] + list(vals) for k, vals in zip(table.ks, table.values)]
    runner.csv("sweep.csv", header, rows)
    runner.json("sweep.json", {
        "probes": table.probes,
        "ks": table.ks,
        "values": table.values,
        "supersolution": table.supersolution,
        "origin_cell": table.origin_cell,
        "complete": table.complete,
        "failure": table.failure,
        "config": {k: cfg[k] for k in sorted(cfg)},
    })


def cmd_sweep(args, render=False):
    keys = dict(_PROBLEM_KEYS, probes="sweep.probes", ladder="sweep.ladder")
    cfg = _cfg_from(args, keys)
    runner = _Runner(cfg, "report" if render else "sweep")
    table = _run_sweep(cfg)
    _emit_sweep(runner, table, cfg)
    code = 0
    if table.complete:
        verdict = dichotomy.classify(table)
        runner.json("verdict.json", {
            "verdict": verdict.verdict,
            "increments": verdict.increments,
            "top_ratio": verdict.top_ratio,
            "ratio_increasing": verdict.ratio_increasing,
            "dini": verdict.dini,
            "thresholds": verdict.thresholds,
        })
    else:
        code = 4
    if (render or args.plot) and table.complete:
        from . import plots

        runner.svg("sweep.svg", plots.sweep_figure(table))
    runner.finish()
    if not table.complete:
        print(f"sweep incomplete: {table.failure}", file=sys.stderr)
    return code


def cmd_classify(args):
    cfg = _cfg_from(args, {"table": "classify.table",
                           "growth": "classify.growth",
                           "saturation": "classify.saturation",
                           "outdir": "output.dir"})
    with open(cfg["classify.table"], "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not data.get("complete", False):
        raise IncompleteSweepError(data.get("failure") or "sweep incomplete")
    table = dichotomy.SweepTable(
        spec=None,
        probes=tuple((float(x), float(t)) for x, t in data["probes"]),
        ks=np.asarray(data["ks"], dtype=float),
        values=np.asarray(data["values"], dtype=float),
        supersolution=np.asarray(data["supersolution"], dtype=float),
        diagnostics=(),
        origin_cell=float(data["origin_cell"]),
    )
    th = {}
    if "classify.growth" in cfg:
        th["growth"] = float(cfg["classify.growth"])
    if "classify.saturation" in cfg:
        th["saturation"] = float(cfg["classify.saturation"])
    # the Dini cross-reference needs the original kernel config
    kcfg = data.get("config", {})
    verdict = dichotomy.classify(_with_spec(table, kcfg), thresholds=th or None)
    runner = _Runner(cfg, "classify")
    runner.json("verdict.json", {
        "verdict": verdict.verdict,
        "increments": verdict.increments,
        "top_ratio": verdict.top_ratio,
        "ratio_increasing": verdict.ratio_increasing,
        "dini": verdict.dini,
        "thresholds": verdict.thresholds,
    })
    runner.finish()
    print(verdict.verdict)
    return 0


def _with_spec(table, kcfg):
    try:
        spec = build_problem(kcfg)
    except (KeyError, DiffabsError):
        spec = None
    if spec is None:
        return table
    return dichotomy.SweepTable(
        spec=spec, probes=table.probes, ks=table.ks, values=table.values,
        supersolution=table.supersolution, diagnostics=table.diagnostics,
        origin_cell=table.origin_cell, complete=table.complete,
        failure=table.failure,
    )


def cmd_energy(args):
    keys = dict(_PROBLEM_KEYS, snapshots="solve.snapshots",
                r="energy.r", tau="energy.tau", mu="energy.mu")
    cfg = _cfg_from(args, keys)
    spec = build_problem(cfg)
    grid = build_grid(cfg, spec)
    init = build_init(cfg)
    snaps = _floats(cfg.get("solve.snapshots", "")) or list(
        np.linspace(init.start_time + 1e-3, spec.T, 120))
    runner = _Runner(cfg, "energy")
    res = rdsolver.solve(spec, init, grid, build_opts(cfg), snapshots=snaps)
    rs = _floats(cfg.get("energy.r", "0.25"))
    taus = _floats(cfg.get("energy.tau", "0.5"))
    mu = cfg.get("energy.mu")
    mu = float(mu) if mu is not None else None
    rows = []
    for r in rs:
        for tau in taus:
            rep = energy.energy_report(res, r=r, tau=tau, mu=mu)
            rows.append([rep.r, rep.tau, rep.I1, rep.I2, rep.I3,
                         rep.f_mu, rep.E1_mu, rep.E2, rep.H])
    runner.csv("energy.csv",
               ["r", "tau", "I1", "I2", "I3", "f_mu", "E1_mu", "E2", "H"],
               rows)
    runner.finish()
    return 0


def cmd_thresholds(args):
    cfg = _cfg_from(args, {"omega": "thresholds.omega",
                           "exponent": "thresholds.exponent",
                           "outdir": "output.dir"})
    om = parse_omega(cfg["thresholds.omega"])
    result = kernels.dini_classify(om, float(cfg.get("thresholds.exponent", 0.5)))
    runner = _Runner(cfg, "thresholds")
    payload = {"class": result.kind, "value": result.value}
    runner.json("thresholds.json", payload)
    runner.finish()
    print(json.dumps(payload))
    return 0


def cmd_verify_lemma1(args):
    cfg = _cfg_from(args, {"sigma": "lemma1.sigma", "ell": "lemma1.ell",
                           "N": "lemma1.N", "tau": "lemma1.tau",
                           "tau_sweep": "lemma1.tau_sweep",
                           "outdir": "output.dir"})
    sigma = float(cfg.get("lemma1.sigma", 1.0))
    ell = float(cfg.get("lemma1.ell", 2.0))
    N = int(cfg.get("lemma1.N", 1))
    runner = _Runner(cfg, "verify-lemma1")
    payload = {"sigma": sigma, "ell": ell, "N": N}
    if cfg.get("lemma1.tau_sweep"):
        beta = kernels.find_beta(sigma, ell, N)
        taus = list(np.linspace(0.1 * beta * sigma, 1.5 * beta * sigma, 12))
        scans = []
        for tau in taus:
            scan = kernels.verify_subsolution_inequality(sigma, tau, ell, N)
            scans.append({"tau": tau, "holds": scan.holds,
                          "margin": scan.margin})
        payload.update({"beta": beta, "scan": scans})
    else:
        tau = float(cfg.get("lemma1.tau", 0.05))
        scan = kernels.verify_subsolution_inequality(sigma, tau, ell, N)
        payload.update({"tau": tau, "holds": scan.holds,
                        "margin": scan.margin, "witness": scan.witness})
    runner.json("lemma1.json", payload)
    runner.finish()
    print(json.dumps({k: payload[k] for k in payload if k != "scan"}))
    return 0


def cmd_schedule(args):
    cfg = _cfg_from(args, {"omega": "schedule.omega", "eps0": "schedule.eps0",
                           "c2": "schedule.c2", "c8": "schedule.c8",
                           "c9": "schedule.c9", "c10": "schedule.c10",
                           "k_min": "schedule.k_min", "k_max": "schedule.k_max",
                           "r_values": "schedule.r_values",
                           "outdir": "output.dir"})
    params = energy.ScheduleParams(
        omega=parse_omega(cfg["schedule.omega"]),
        eps0=float(cfg.get("schedule.eps0", 0.25)),
        c2=float(cfg.get("schedule.c2", 1.0)),
        c8=float(cfg.get("schedule.c8", 1.0)),
        c9=float(cfg.get("schedule.c9", 1.0)),
        c10=float(cfg.get("schedule.c10", 1.0)),
        k_min=int(cfg.get("schedule.k_min", 2)),
        k_max=int(cfg.get("schedule.k_max", 20)),
    )
    r_values = cfg.get("schedule.r_values")
    tab = energy.schedule(params, _floats(r_values) if r_values else None)
    runner = _Runner(cfg, "schedule")
    runner.csv(
        "schedule.csv",
        ["k", "log_M", "M", "r", "tau", "bound", "partial_sum", "integral"],
        zip(tab.k, tab.log_M, tab.M, tab.r, tab.tau, tab.bound,
            tab.partial_sum, tab.integral),
    )
    runner.finish()
    return 0


def cmd_report(args):
    return cmd_sweep(args, render=True)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser():
    p = argparse.ArgumentParser(
        prog="diffabs",
        description="diffusion-versus-absorption laboratory for semilinear "
                    "and degenerate parabolic equations",
    )
    sub = p.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("solve", help="integrate one problem and store snapshots")
    _add_problem_flags(sp)
    sp.add_argument("--snapshots", help="comma-separated snapshot times")
    sp.set_defaults(fn=cmd_solve)

    sp = sub.add_parser("profile", help="very-singular-solution profile")
    sp.add_argument("--config")
    sp.add_argument("--N", type=int)
    sp.add_argument("--ell", type=float, required=True)
    sp.add_argument("--eta-max", dest="eta_max", type=float)
    sp.add_argument("--tolerance", type=float)
    sp.add_argument("--out", dest="outdir", default=None)
    sp.add_argument("--plot", action="store_true")
    sp.set_defaults(fn=cmd_profile, preset=None)

    for name, render in (("sweep", False), ("report", True)):
        sp = sub.add_parser(name, help="k-sweep of fundamental solutions"
                            + (" with figures" if render else ""))
        _add_problem_flags(sp)
        sp.add_argument("--probes", help='probes "x:t,x:t"')
        sp.add_argument("--ladder", help='"lo:hi:n" geometric or comma list')
        sp.set_defaults(fn=cmd_report if render else cmd_sweep)

    sp = sub.add_parser("classify", help="verdict from a stored sweep table")
    sp.add_argument("--config")
    sp.add_argument("--table", required=True, help="sweep.json path")
    sp.add_argument("--growth", type=float)
    sp.add_argument("--saturation", type=float)
    sp.add_argument("--out", dest="outdir", default=None)
    sp.set_defaults(fn=cmd_classify, preset=None)

    sp = sub.add_parser("energy", help="energy functionals of a run")
    _add_problem_flags(sp)
    sp.add_argument("--snapshots")
    sp.add_argument("--r", help="comma-separated r values")
    sp.add_argument("--tau", help="comma-separated tau values")
    sp.add_argument("--mu", type=float)
    sp.set_defaults(fn=cmd_energy)

    sp = sub.add_parser("thresholds", help="Dini-type integral classification")
    sp.add_argument("--config")
    sp.add_argument("--omega", required=True)
    sp.add_argument("--exponent", type=float)
    sp.add_argument("--out", dest="outdir", default=None)
    sp.set_defaults(fn=cmd_thresholds, preset=None)

    sp = sub.add_parser("verify-lemma1", help="subsolution inequality scan")
    sp.add_argument("--config")
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--ell", type=float)
    sp.add_argument("--N", type=int)
    sp.add_argument("--tau", type=float)
    sp.add_argument("--tau-sweep", dest="tau_sweep", action="store_true")
    sp.add_argument("--out", dest="outdir", default=None)
    sp.set_defaults(fn=cmd_verify_lemma1, preset=None)

    sp = sub.add_parser("schedule", help="proof-schedule bookkeeping table")
    sp.add_argument("--config")
    sp.add_argument("--omega", required=True)
    sp.add_argument("--eps0", type=float)
    sp.add_argument("--c2", type=float)
    sp.add_argument("--c8", type=float)
    sp.add_argument("--c9", type=float)
    sp.add_argument("--c10", type=float)
    sp.add_argument("--k-min", dest="k_min", type=int)
    sp.add_argument("--k-max", dest="k_max", type=int)
    sp.add_argument("--r-values", dest="r_values")
    sp.add_argument("--out", dest="outdir", default=None)
    sp.set_defaults(fn=cmd_schedule, preset=None)

    return p


def run(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except IncompleteSweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (DomainError, KeyError, OSError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DiffabsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
