"""Local energy functionals and proof-schedule bookkeeping.

Post-processing for stored solver runs: the exterior/interior energy
integrals that control single-point blow-up, and the (M_k, tau_k, r_k)
schedule calculator with its sum-versus-integral comparison.  The
schedule is a calculator for the proof's bookkeeping with abstract
constants (defaults 1), not a verified bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import (
    DomainError,
    InsufficientResolutionError,
    NotFoundError,
    WrongVariantError,
)
from .kernels import H_integral, OmegaSpec

__all__ = ["EnergyReport", "ScheduleParams", "ScheduleTable",
           "energy_report", "schedule"]

_E_INV = math.exp(-1.0)


@dataclass(frozen=True)
class EnergyReport:
    """Energy functionals of one run at a fixed (r, tau) pair.

    I1, I2, I3 integrate |grad u|^2, u^2, h(t)|u|^{q+1} over the outer
    time slab (r, 1) and the whole (truncated) domain; f_mu, E1_mu, E2
    live on the exterior region {|x| > tau} x (0, r].
    """

    r: float
    tau: float
    I1: float
    I2: float
    I3: float
    f_mu: float
    E1_mu: float
    E2: float
    H: float
    mu: str  # descriptor of the weight actually used


@dataclass(frozen=True)
class ScheduleParams:
    """Abstract constants and ladder for the schedule calculator."""

    omega: OmegaSpec
    eps0: float = 0.25
    c2: float = 1.0
    c8: float = 1.0
    c9: float = 1.0
    c10: float = 1.0
    k_min: int = 2
    k_max: int = 20

    def __post_init__(self):
        if not 0.0 < self.eps0 < _E_INV:
            raise DomainError("eps0 must lie in (0, 1/e)")
        for name in ("c2", "c8", "c9", "c10"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be positive")
        if self.k_max < self.k_min:
            raise DomainError("empty k range")


@dataclass(frozen=True)
class ScheduleTable:
    k: np.ndarray           # ladder indices n..k_max
    log_M: np.ndarray       # e^k (so M_k = exp(log_M), overflowing to inf)
    M: np.ndarray
    r: np.ndarray           # r_k (supplied or bound-mode proxy b_k)
    tau: np.ndarray         # 8 sqrt(r_k [(1-eps0) e^k + ln(c2/r_k)])
    bound: np.ndarray       # c8 sqrt(omega(c9 e^{-k}))
    partial_sum: np.ndarray  # sum of bound values from k_min up to each k
    integral: np.ndarray    # c10 * int_{c9 e^{-k}}^{c9 e^{-k_min}} sqrt(omega)/s ds


# ---------------------------------------------------------------------------
# energy functionals
# ---------------------------------------------------------------------------

def _radial_gradient(u, r):
    """du/dr by centered differences; symmetric at 0, one-sided at R."""
    g = np.gradient(u, r, axis=-1)
    g[..., 0] = 0.0
    return g


def _space_integral(values, volumes):
    return values @ volumes


def _exterior_volumes(grid, tau):
    """Cell volumes of {|x| > tau}; the straddling cell enters fractionally."""
    faces = grid.faces
    vol = grid.volumes.copy()
    vol[faces[1:] <= tau] = 0.0
    i = int(np.searchsorted(faces, tau, side="right") - 1)
    if 0 <= i < vol.size and faces[i] < tau < faces[i + 1]:
        sN = grid.volumes.sum() / (faces[-1] ** grid.N)  # |B_1| in this N
        vol[i] = sN * (faces[i + 1] ** grid.N - tau**grid.N)
    return vol


def _trapz_time(samples, times):
    return float(np.trapezoid(samples, times))


def _mu_value(mu, tau):
    if mu is None:
        return 0.0, "0"
    if callable(mu):
        return float(mu(tau)), getattr(mu, "__name__", "mu(tau)")
    return float(mu), f"{float(mu):g}"


def energy_report(result, r: float, tau: float, mu=None) -> EnergyReport:
    """Energy functionals of a stored run at outer radius tau, split time r.

    All integrals use trapezoidal quadrature over the stored snapshots
    and centered-difference radial gradients; the exterior region is the
    set of grid nodes beyond tau.  mu may be a constant, a callable of
    tau, or None (weight 1).
    """
    spec = result.spec
    if spec.variant not in ("power", "power-plus-one"):
        raise WrongVariantError(
            "energy functionals are defined for the power-absorption equation"
        )
    if not 0.0 < r < 1.0:
        raise DomainError("r must lie in (0, 1)")
    if tau < 0.0:
        raise DomainError("tau must be nonnegative")
    times = np.asarray(result.times, dtype=float)
    if times[-1] < 1.0 - 1e-9:
        raise DomainError("run must cover (0, 1] in time for energy reports")

    outer = (times >= r) & (times <= 1.0 + 1e-12)
    if int(np.count_nonzero((times > r) & (times < 1.0))) < 8:
        raise InsufficientResolutionError(
            "need at least 8 snapshots inside (r, 1) for the outer integrals"
        )
    inner = times <= r + 1e-12

    rr = result.grid.r
    vol = result.grid.volumes
    fields = np.asarray(result.fields, dtype=float)
    grads = _radial_gradient(fields, rr)
    q = spec.q
    h_vals = np.array([spec.kernel(t) if t > 0 else 0.0 for t in times])

    t_out = times[outer]
    I1 = _trapz_time(_space_integral(grads[outer] ** 2, vol), t_out)
    I2 = _trapz_time(_space_integral(fields[outer] ** 2, vol), t_out)
    absorb = np.abs(fields[outer]) ** (q + 1.0)
    I3 = _trapz_time(h_vals[outer] * _space_integral(absorb, vol), t_out)

    mu_val, mu_desc = _mu_value(mu, tau)
    ext_vol = _exterior_volumes(result.grid, tau)
    t_in = times[inner]
    w = np.exp(-(mu_val**2) * t_in)
    e1_samples = w * _space_integral(
        grads[inner] ** 2 + mu_val**2 * fields[inner] ** 2, ext_vol
    )
    E1 = _trapz_time(e1_samples, t_in)
    ext_sq = _space_integral(fields[inner] ** 2, ext_vol)
    E2 = _trapz_time(ext_sq, t_in)
    f_mu = float(np.max(w * ext_sq))

    return EnergyReport(
        r=r, tau=tau, I1=I1, I2=I2, I3=I3,
        f_mu=f_mu, E1_mu=E1, E2=E2,
        H=H_integral(spec.kernel, r), mu=mu_desc,
    )


# ---------------------------------------------------------------------------
# schedule
# ---------------------------------------------------------------------------

def _solve_bk(omega, k, t_hi):
    """Bound-mode radius proxy: omega(b)/b = e^k, decreasing left side."""
    def g(log_b):
        b = math.exp(log_b)
        return math.log(omega(b) / b) - k

    lo, hi = math.log(1e-60), math.log(t_hi)
    try:
        if g(lo) < 0.0 or g(hi) > 0.0:
            raise ValueError("no sign change")
        return math.exp(brentq(g, lo, hi, xtol=1e-14))
    except ValueError as exc:
        raise NotFoundError(
            f"bound-mode solve omega(b)/b = e^{k} failed to bracket: {exc}"
        ) from None


def schedule(params: ScheduleParams, r_values=None) -> ScheduleTable:
    """Tabulate (k, M_k, tau_k), the tail bound, its sums and the integral.

    r_values, when given, supplies r_k for k = k_min..k_max; otherwise
    each r_k is the bound-mode proxy b_k with omega(b_k)/b_k = e^k.  The
    partial sums accumulate the bound c8 sqrt(omega(c9 e^{-k})) from
    k_min upward, and the integral column is the matching Dini-type
    integral of c10 sqrt(omega(s))/s.
    """
    ks = np.arange(params.k_min, params.k_max + 1)
    omega = params.omega
    if r_values is not None:
        r = np.asarray(list(r_values), dtype=float)
        if r.size != ks.size:
            raise DomainError("r_values length must match the k range")
        if np.any(r <= 0.0):
            raise DomainError("r_k values must be positive")
    else:
        t_hi = omega.t_max if omega.t_max is not None else 1.0
        r = np.array([_solve_bk(omega, int(k), t_hi) for k in ks])

    log_M = np.exp(ks.astype(float))
    with np.errstate(over="ignore"):
        M = np.exp(log_M)
    tau = 8.0 * np.sqrt(r * ((1.0 - params.eps0) * log_M + np.log(params.c2 / r)))

    probe = params.c9 * np.exp(-ks.astype(float))
    bound = params.c8 * np.sqrt([omega(float(p)) for p in probe])
    partial = np.cumsum(bound)

    def integrand(s):
        return math.sqrt(omega(s)) / s

    upper = params.c9 * math.exp(-params.k_min)
    integral = np.empty_like(partial)
    for i, p in enumerate(probe):
        val, _ = quad(integrand, float(p), upper, limit=200)
        integral[i] = params.c10 * val

    return ScheduleTable(
        k=ks, log_M=log_M, M=M, r=r, tau=tau,
        bound=bound, partial_sum=partial, integral=integral,
    )
