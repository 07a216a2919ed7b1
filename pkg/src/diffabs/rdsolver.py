"""Radially symmetric method-of-lines integrator.

Conservative finite-volume discretization of the radial Laplacian in R^N
(symmetry at r = 0, homogeneous Dirichlet at r = R) combined with a
one-step theta scheme: diffusion implicit via a tridiagonal solve,
absorption implicit pointwise via scalar Newton per node, Lie splitting
between the two.  Every substep is order-preserving, which is what gives
the discrete comparison principle (monotonicity in the initial mass k and
the flat-supersolution bound) exactly rather than up to scheme error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .errors import (
    ComparisonViolation,
    DomainError,
    NumericalFailure,
    StepFailure,
)
from .kernels import AbsorptionKernel, H_integral, ProblemSpec

__all__ = [
    "RadialGrid",
    "InitialData",
    "SolverOptions",
    "SolveResult",
    "heat_kernel",
    "solve",
    "solve_comparison_pair",
    "probe",
]


def _unit_ball_volume(N):
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0)


def heat_kernel(N, r, t):
    """N-dimensional heat kernel at radius r, time t (unit mass)."""
    r = np.asarray(r, dtype=float)
    return (4.0 * math.pi * t) ** (-N / 2.0) * np.exp(-(r * r) / (4.0 * t))


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------

@dataclass
class RadialGrid:
    """Node radii with finite-volume cell measures in R^N.

    Nodes r[0] = 0 < ... < r[M] = R; cell faces at midpoints; cell j is
    the radial shell between adjacent faces so the volumes sum exactly to
    |B_R|.
    """

    r: np.ndarray
    N: int
    faces: np.ndarray = field(init=False)
    volumes: np.ndarray = field(init=False)
    areas: np.ndarray = field(init=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise DomainError("grid nodes must be strictly increasing from r=0")
        self.r = r
        N = self.N
        vN = _unit_ball_volume(N)
        sN = N * vN  # unit-sphere surface measure
        mids = 0.5 * (r[:-1] + r[1:])
        faces = np.concatenate(([0.0], mids, [r[-1]]))
        self.faces = faces
        self.volumes = vN * (faces[1:] ** N - faces[:-1] ** N)
        with np.errstate(divide="ignore"):
            self.areas = sN * faces ** (N - 1)
        # face at r=0 carries zero flux (symmetry) regardless of dimension
        self.areas[0] = 0.0

    @classmethod
    def graded(cls, R, M, N, stretch=1.02):
        """Geometric spacing growing by `stretch` away from the origin."""
        if stretch <= 1.0:
            dr = np.full(M, R / M)
        else:
            w = stretch ** np.arange(M)
            dr = R * w / w.sum()
        r = np.concatenate(([0.0], np.cumsum(dr)))
        r[-1] = R
        return cls(r=r, N=N)

    @property
    def R(self):
        return float(self.r[-1])

    @property
    def M(self):
        return self.r.size - 1

    def laplacian_tridiag(self):
        """Tridiagonal coefficients of the FV Laplacian on nodes 0..M-1.

        Returns (sub, diag, sup) such that (L u)_j = sub[j] u_{j-1}
        + diag[j] u_j + sup[j] u_{j+1} with u_M = 0 eliminated.
        """
        r, vol, A = self.r, self.volumes, self.areas
        M = self.M
        sub = np.zeros(M)
        diag = np.zeros(M)
        sup = np.zeros(M)
        for j in range(M):
            a_lo = A[j] / (r[j] - r[j - 1]) if j > 0 else 0.0
            a_hi = A[j + 1] / (r[j + 1] - r[j])
            sub[j] = a_lo / vol[j]
            sup[j] = a_hi / vol[j]
            diag[j] = -(a_lo + a_hi) / vol[j]
        sup[M - 1] = 0.0  # Dirichlet: u_M = 0 but flux through it remains in diag
        return sub, diag, sup

    def mass(self, u):
        return float(np.dot(self.volumes, u))


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InitialData:
    """Dirac approximation or control initial data.

    ``warm-start``: k * G_N(r, t0), the heat kernel warm start.
    ``bump``:       Mk**0.5 * k**(-N/2) * eta_k(r) with eta_k a unit-mass
                    quartic bump supported in B_{1/k}, evaluated at t = 0.
    ``flat``:       constant A (interior; Dirichlet boundary still 0).
    ``samples``:    caller-provided nodal values at t = t0.
    """

    variant: str
    k: float = 1.0
    t0: float = 1e-3
    Mk: float = 1.0
    A: float = 1.0
    samples: tuple = ()

    def __post_init__(self):
        if self.variant not in ("warm-start", "bump", "flat", "samples"):
            raise DomainError(f"unknown initial data variant {self.variant!r}")
        if self.variant == "warm-start" and self.t0 <= 0:
            raise DomainError("warm start requires t0 > 0")

    @property
    def start_time(self):
        # warm-start and sampled data are given at t = t0, not at t = 0
        return self.t0 if self.variant in ("warm-start", "samples") else 0.0

    def build(self, grid: RadialGrid):
        r = grid.r
        if self.variant == "warm-start":
            u0 = self.k * heat_kernel(grid.N, r, self.t0)
        elif self.variant == "bump":
            N, k = grid.N, self.k
            sN = N * _unit_ball_volume(N)
            i_n = sN * (1.0 / N - 2.0 / (N + 2.0) + 1.0 / (N + 4.0))
            ck = k**N / i_n  # unit mass normalization of eta_k
            s = np.clip(k * r, 0.0, 1.0)
            eta = ck * (1.0 - s * s) ** 2
            u0 = math.sqrt(self.Mk) * k ** (-N / 2.0) * eta
        elif self.variant == "flat":
            u0 = np.full_like(r, float(self.A))
        else:
            u0 = np.asarray(self.samples, dtype=float)
            if u0.shape != r.shape:
                raise DomainError("sample initial data does not match the grid")
        u0 = u0.copy()
        u0[-1] = 0.0
        return u0

    def core_radius(self):
        """Length scale the grid must resolve (>= 8 nodes across it)."""
        if self.variant == "warm-start":
            return math.sqrt(self.t0)
        if self.variant == "bump":
            return 1.0 / self.k
        return None


# ---------------------------------------------------------------------------
# options / result
# ---------------------------------------------------------------------------

@dataclass
class SolverOptions:
    theta: float = 1.0
    rtol: float = 1e-6  # step-doubling local error target (relative)
    atol: float = 1e-10
    dt_init: float = 1e-6
    dt_min: float = 1e-14
    max_steps: int = 500_000
    newton_tol: float = 1e-12
    newton_max: int = 60
    eps_d: float = 1e-10  # porous mobility regularization
    monitor_slack: float = 1e-6
    monitor: bool = True
    fixed_steps: tuple | None = None  # replay of a recorded (t, dt) schedule


@dataclass
class SolveResult:
    times: np.ndarray
    fields: np.ndarray  # (n_snapshots, n_nodes)
    grid: RadialGrid
    spec: ProblemSpec
    diagnostics: dict
    clamped: bool
    accepted_steps: tuple  # (t_start, dt) pairs, replayable

    def mass_series(self):
        return np.array([self.grid.mass(u) for u in self.fields])


# ---------------------------------------------------------------------------
# absorption terms
# ---------------------------------------------------------------------------

class _Absorption:
    """g(t, u) and its u-derivative for one equation variant."""

    def __init__(self, spec: ProblemSpec):
        self.spec = spec
        self.kernel = spec.kernel
        self.variant = spec.variant
        self.q = spec.q

    def rate(self, log_h, u):
        if self.variant == "exponential":
            if log_h == -math.inf:
                return np.zeros_like(u)
            with np.errstate(over="ignore"):
                return np.exp(np.minimum(log_h + u, 700.0))
        h = 0.0 if log_h == -math.inf else math.exp(max(log_h, -745.0))
        if self.variant == "power-plus-one":
            # extended by max(u, 0): the auxiliary solution dips below zero
            # near the Dirichlet boundary, where the rate is the constant h
            return h * (np.maximum(u, 0.0) ** self.q + 1.0)
        return h * u**self.q

    def rate_du(self, log_h, u):
        if self.variant == "exponential":
            return self.rate(log_h, u)
        h = 0.0 if log_h == -math.inf else math.exp(max(log_h, -745.0))
        return h * self.q * np.maximum(u, 0.0) ** (self.q - 1.0)


_GAUSS5 = np.polynomial.legendre.leggauss(5)


def _gauss_panel(kernel, a, b):
    if b <= a:
        return 0.0
    x, w = _GAUSS5
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * float(np.dot(w, kernel(mid + half * x)))


def _H_increment(kernel, a, b):
    """H(b) - H(a) over a substep, closed form when available."""
    if b <= a:
        return 0.0
    # pure power-law integrands (including divergent-H thresholds) integrate
    # exactly even when H itself is infinite
    pl = None
    if kernel.family == "power":
        pl = (kernel.coeff, kernel.expo)
    elif (kernel.family == "porous-threshold"
          and getattr(kernel.omega, "family", None) == "power"):
        pl = (1.0 / kernel.omega.a,
              (kernel.q - kernel.m) / (kernel.m - 1.0) - kernel.omega.alpha)
    if pl is not None:
        c, p = pl
        if a <= 0.0:
            return math.inf if p <= -1.0 else c * b ** (p + 1.0) / (p + 1.0)
        if abs(p + 1.0) < 1e-14:
            return c * math.log(b / a)
        return c * (b ** (p + 1.0) - a ** (p + 1.0)) / (p + 1.0)
    la = kernel.log_H(a) if a > 0.0 else -math.inf
    lb = kernel.log_H(b)
    if la is not None and lb is not None and lb != math.inf:
        Ha = 0.0 if la == -math.inf else math.exp(la)
        Hb = 0.0 if lb == -math.inf else math.exp(lb)
        return max(Hb - Ha, 0.0)
    return _gauss_panel(kernel, a, b)


class _Bound:
    """Flat supersolution started at t0: bounds any solution of the IVP.

    Tracks the running increment of H past the start time; the committed
    value only moves forward on accepted steps, so rejected trial steps do
    not pollute the primitive.
    """

    def __init__(self, spec: ProblemSpec, t_start: float):
        self.spec = spec
        self.kernel = spec.kernel
        self._t = t_start
        self._dH = 0.0  # H(t) - H(t_start), committed

    def _panel(self, a, b):
        if b <= a:
            return 0.0
        x, w = _GAUSS5
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        return half * float(np.dot(w, self.kernel(mid + half * x)))

    def eval(self, t):
        """Bound value at any t >= the last committed time."""
        dH = self._dH + self._panel(self._t, t)
        if dH <= 0.0:
            return math.inf
        if self.spec.variant == "exponential":
            return -math.log(dH)
        q = self.spec.q
        lv = -math.log((q - 1.0) * dH) / (q - 1.0)
        return math.inf if lv > 709.0 else math.exp(lv)

    def commit(self, t):
        self._dH += self._panel(self._t, t)
        self._t = t


# ---------------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------------

class _Stepper:
    def __init__(self, spec, grid, opts):
        self.spec = spec
        self.grid = grid
        self.opts = opts
        self.absorption = _Absorption(spec)
        sub, diag, sup = grid.laplacian_tridiag()
        self.L = (sub, diag, sup)
        self.M = grid.M
        self.newton_iters = 0
        self.clamp_events = 0

    # -- linear diffusion ---------------------------------------------------

    def _apply_L(self, v):
        sub, diag, sup = self.L
        out = diag * v
        out[1:] += sub[1:] * v[:-1]
        out[:-1] += sup[:-1] * v[1:]
        return out

    def _diffuse_linear(self, u, dt):
        theta = self.opts.theta
        sub, diag, sup = self.L
        rhs = u[: self.M].copy()
        if theta < 1.0:
            rhs += (1.0 - theta) * dt * self._apply_L(u[: self.M])
        ab = np.zeros((3, self.M))
        ab[0, 1:] = -theta * dt * sup[:-1]
        ab[1, :] = 1.0 - theta * dt * diag
        ab[2, :-1] = -theta * dt * sub[1:]
        sol = solve_banded((1, 1), ab, rhs)
        out = np.zeros_like(u)
        out[: self.M] = sol
        return out

    # -- porous (degenerate) diffusion --------------------------------------

    def _phi(self, u):
        m, eps = self.spec.m, self.opts.eps_d
        up = np.maximum(u, 0.0)
        return up * (up + eps) ** (m - 1.0)

    def _phi_du(self, u):
        m, eps = self.spec.m, self.opts.eps_d
        up = np.maximum(u, 0.0)
        return (up + eps) ** (m - 1.0) + (m - 1.0) * up * (up + eps) ** (m - 2.0)

    def _diffuse_porous(self, u, dt, t_new):
        theta = self.opts.theta
        sub, diag, sup = self.L
        un = u[: self.M]
        rhs = un.copy()
        if theta < 1.0:
            rhs += (1.0 - theta) * dt * self._apply_L(self._phi(un))
        v = un.copy()
        tol = self.opts.newton_tol * max(1.0, float(np.max(np.abs(un))))
        for it in range(self.opts.newton_max):
            F = v - theta * dt * self._apply_L(self._phi(v)) - rhs
            nrm = float(np.max(np.abs(F)))
            self.newton_iters += 1
            if nrm <= tol:
                break
            dphi = self._phi_du(v)
            ab = np.zeros((3, self.M))
            ab[0, 1:] = -theta * dt * sup[:-1] * dphi[1:]
            ab[1, :] = 1.0 - theta * dt * diag * dphi
            ab[2, :-1] = -theta * dt * sub[1:] * dphi[:-1]
            try:
                delta = solve_banded((1, 1), ab, F)
            except Exception as exc:  # singular Jacobian
                raise StepFailure(f"porous Newton linear solve failed: {exc}",
                                  t_fail=t_new)
            # damped update, keep iterates nonnegative
            lam = 1.0
            for _ in range(8):
                vtry = v - lam * delta
                Ftry = vtry - theta * dt * self._apply_L(self._phi(vtry)) - rhs
                if float(np.max(np.abs(Ftry))) < nrm:
                    v = vtry
                    break
                lam *= 0.5
            else:
                v = v - delta
        else:
            raise StepFailure("porous Newton did not converge", t_fail=t_new)
        out = np.zeros_like(u)
        out[: self.M] = np.maximum(v, 0.0)
        return out

    # -- absorption ---------------------------------------------------------

    def _absorb(self, u, t_old, t_new, dt):
        """Absorption substep as the exact flow of u' = -g(t, u).

        With dH = H(t_new) - H(t_old) the power/porous substep is
        (u^{1-q} + (q-1) dH)^{-1/(q-1)} and the exponential one is
        -ln(e^{-u} + dH); both are monotone in the data, unconditionally
        stable, and immune to the stiffness of singular kernels.  Only
        the power-plus-one variant has no closed flow and keeps an
        implicit Newton substep.
        """
        ab = self.absorption
        if ab.variant == "power-plus-one":
            return self._absorb_implicit(u, t_old, t_new, dt)
        dH = _H_increment(ab.kernel, t_old, t_new)
        if dH == 0.0:
            v = u.copy()
            v[-1] = 0.0
            return v
        if ab.variant == "exponential":
            with np.errstate(over="ignore"):
                eu = np.exp(u)
            v = np.where(np.isfinite(eu), u - np.log1p(dH * eu), -math.log(dH))
        else:
            q = ab.q
            with np.errstate(divide="ignore", over="ignore"):
                v = (u ** (1.0 - q) + (q - 1.0) * dH) ** (-1.0 / (q - 1.0))
            v = np.where(u > 0.0, v, 0.0)
        v[-1] = 0.0
        return v

    def _absorb_implicit(self, u, t_old, t_new, dt):
        theta = self.opts.theta
        ab = self.absorption
        lh_new = float(ab.kernel.log_h(t_new))
        rhs = u.copy()
        if theta < 1.0:
            lh_old = float(ab.kernel.log_h(max(t_old, 1e-300)))
            rhs -= (1.0 - theta) * dt * ab.rate(lh_old, u)
        if lh_new == -math.inf and theta == 1.0:
            rhs[-1] = 0.0
            return rhs
        v = rhs.copy()
        tdt = theta * dt
        tol = self.opts.newton_tol * max(1.0, float(np.max(np.abs(rhs))))
        for it in range(self.opts.newton_max):
            F = v + tdt * ab.rate(lh_new, v) - rhs
            self.newton_iters += 1
            bad = np.abs(F) > tol
            if not np.any(bad):
                break
            # F is monotone increasing in v (dF >= 1), so plain Newton is
            # globally convergent and exact on the linear negative branch
            dF = 1.0 + tdt * ab.rate_du(lh_new, v)
            v = v - F / dF
        else:
            raise StepFailure("absorption Newton did not converge",
                              t_fail=t_new)
        v[-1] = 0.0
        return v

    # -- one full splitting step -------------------------------------------

    def step(self, u, t_old, dt):
        t_new = t_old + dt
        if self.spec.variant == "porous":
            ud = self._diffuse_porous(u, dt, t_new)
        else:
            ud = self._diffuse_linear(u, dt)
        return self._absorb(ud, t_old, t_new, dt)


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _check_resolution(grid, init):
    core = init.core_radius()
    if core is not None and int(np.count_nonzero(grid.r[1:] <= core)) + 1 < 8:
        raise DomainError(
            "grid does not resolve the initial data: need >= 8 nodes across "
            f"radius {core:g}"
        )


def solve(spec: ProblemSpec, init: InitialData, grid: RadialGrid,
          opts: SolverOptions | None = None, snapshots=None) -> SolveResult:
    """Integrate the variant's semi-discrete system to T with snapshots.

    Adaptive step control by step-doubling (the two-half-steps value is
    the accepted one); the flat supersolution started at the initial time
    is monitored and a violation beyond tolerance aborts the run.
    """
    if opts is None:
        opts = SolverOptions()
    if grid.N != spec.N:
        raise DomainError("grid dimension does not match the problem spec")
    _check_resolution(grid, init)
    t = init.start_time
    if t >= spec.T:
        raise DomainError("time horizon T must exceed the start time")
    if snapshots is None:
        snapshots = np.linspace(t, spec.T, 9)[1:]
    snap_times = sorted(float(s) for s in snapshots if t < s <= spec.T + 1e-15)
    if not snap_times:
        raise DomainError("no snapshot times inside (t_start, T]")

    u = init.build(grid)
    stepper = _Stepper(spec, grid, opts)
    bound = _Bound(spec, t) if opts.monitor else None

    out_t = [t] if math.isclose(t, snap_times[0]) else []
    out_u = [u.copy()] if out_t else []
    steps = []
    rejected = 0
    max_ratio = 0.0

    replay = list(opts.fixed_steps) if opts.fixed_steps is not None else None
    dt = opts.dt_init
    next_snap = 0
    n_accepted = 0
    while next_snap < len(snap_times):
        if n_accepted >= opts.max_steps:
            raise StepFailure("step budget exhausted", t_fail=t)
        target = snap_times[next_snap]
        if replay is not None:
            if not replay:
                raise StepFailure("replay schedule exhausted before horizon", t_fail=t)
            dt_try = min(replay[0][1], target - t)
        else:
            dt_try = min(dt, target - t)
        if dt_try < opts.dt_min:
            dt_try = min(opts.dt_min, target - t)

        try:
            u_big = stepper.step(u, t, dt_try)
            uh = stepper.step(u, t, 0.5 * dt_try)
            u_half = stepper.step(uh, t + 0.5 * dt_try, 0.5 * dt_try)
        except StepFailure:
            if replay is not None:
                raise
            dt = 0.5 * dt_try
            rejected += 1
            if dt < opts.dt_min:
                raise
            continue

        scale = opts.atol + opts.rtol * np.maximum(np.abs(u_half), np.abs(u))
        err = float(np.max(np.abs(u_big - u_half) / scale))
        if replay is None and err > 1.0:
            rejected += 1
            dt = dt_try * max(0.2, 0.9 * err**-0.5)
            if dt < opts.dt_min:
                raise StepFailure("step size underflow", t_fail=t)
            continue

        u = u_half
        t = t + dt_try
        n_accepted += 1
        steps.append((t - dt_try, dt_try))
        if replay is not None:
            replay.pop(0)
        else:
            dt = dt_try * min(4.0, max(0.2, 0.9 * max(err, 1e-12) ** -0.5))

        if bound is not None:
            bv = bound.eval(t)
            bound.commit(t)
            if math.isfinite(bv):
                umax = float(np.max(u))
                if spec.variant == "exponential":
                    if umax > bv + opts.monitor_slack:
                        raise ComparisonViolation(
                            f"u = {umax:g} exceeded supersolution {bv:g} at t = {t:g}"
                        )
                    ratio = umax - bv
                else:
                    if umax > bv * (1.0 + opts.monitor_slack):
                        raise ComparisonViolation(
                            f"u = {umax:g} exceeded supersolution {bv:g} at t = {t:g}"
                        )
                    ratio = umax / bv
                max_ratio = max(max_ratio, ratio)

        while next_snap < len(snap_times) and t >= snap_times[next_snap] - max(
            1e-14, 1e-12 * snap_times[next_snap]
        ):
            out_t.append(snap_times[next_snap])
            out_u.append(u.copy())
            next_snap += 1

    diagnostics = {
        "steps": n_accepted,
        "rejected": rejected,
        "newton_iterations": stepper.newton_iters,
        "clamp_events": stepper.clamp_events,
        "max_field": float(np.max(np.stack(out_u))),
        "max_supersolution_ratio": max_ratio,
        "mass": [grid.mass(v) for v in out_u],
    }
    return SolveResult(
        times=np.array(out_t),
        fields=np.stack(out_u),
        grid=grid,
        spec=spec,
        diagnostics=diagnostics,
        clamped=stepper.clamp_events > 0,
        accepted_steps=tuple(steps),
    )


def solve_comparison_pair(spec: ProblemSpec, spec2: ProblemSpec,
                          init: InitialData, grid: RadialGrid,
                          opts: SolverOptions | None = None,
                          snapshots=None):
    """Solve both equations on the same grid and step schedule.

    spec2 (the auxiliary equation, usually the stiffer one) drives the
    adaptive schedule; spec replays it, so the discrete comparison
    principle applies substep by substep.  Returns both results and an
    ordering report with min/max of (u - v) over the stored space-time
    grid.
    """
    if opts is None:
        opts = SolverOptions()
    res2 = solve(spec2, init, grid, opts, snapshots)
    opts_replay = SolverOptions(**{**opts.__dict__, "fixed_steps": res2.accepted_steps})
    res1 = solve(spec, init, grid, opts_replay, snapshots)
    diff = res1.fields - res2.fields
    report = {
        "min_difference": float(np.min(diff)),
        "max_difference": float(np.max(diff)),
        "snapshot_times": res1.times.tolist(),
    }
    return res1, res2, report


def probe(result: SolveResult, x0: float, t0: float) -> float:
    """Bilinear interpolation of the stored snapshots at (x0, t0)."""
    times, r = result.times, result.grid.r
    if not (times[0] <= t0 <= times[-1]) or not (r[0] <= x0 <= r[-1]):
        raise DomainError("probe outside the stored space-time range")
    i = int(np.searchsorted(times, t0, side="right") - 1)
    i = min(max(i, 0), times.size - 2) if times.size > 1 else 0
    u_lo = np.interp(x0, r, result.fields[i])
    if times.size == 1 or math.isclose(t0, times[i]):
        return float(u_lo)
    u_hi = np.interp(x0, r, result.fields[i + 1])
    w = (t0 - times[i]) / (times[i + 1] - times[i])
    return float((1.0 - w) * u_lo + w * u_hi)
