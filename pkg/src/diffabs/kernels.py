"""Absorption-coefficient families h(t), their primitives and classifiers.

The time-dependent coefficient h multiplying the absorption term controls
how much of a point mass survives diffusion.  This module defines the
built-in h families, the flat supersolutions U and Utilde obtained by
solving the absorption ODE from +infinity, the Dini-integral classifiers
that separate complete from single-point initial blow-up, and the explicit
constants of the subsolution construction used by the comparison
experiment.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import (
    DomainError,
    InsufficientDataError,
    NotFoundError,
    NumericalFailure,
    WrongVariantError,
)

__all__ = [
    "OmegaSpec",
    "AbsorptionKernel",
    "ProblemSpec",
    "DiniResult",
    "ScanResult",
    "eval_h",
    "H_integral",
    "eval_U",
    "eval_Utilde",
    "dini_classify",
    "theta_exponent",
    "alpha_ell",
    "ell_star",
    "lemma1_constant",
    "verify_subsolution_inequality",
    "find_beta",
]

# Underflow threshold for exp(); below this log-value h is exactly 0.0.
_LOG_TINY = -745.0


# ---------------------------------------------------------------------------
# omega descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OmegaSpec:
    """Descriptor of the nondecreasing modulus omega(t).

    Families: ``constant`` (omega = sigma), ``power`` (omega = a*t**alpha
    with 0 <= alpha < 1) and ``tabulated`` (piecewise-linear table).
    """

    family: str
    sigma: float = 1.0
    a: float = 1.0
    alpha: float = 0.5
    table_t: tuple = ()
    table_v: tuple = ()
    t_max: float = 1.0

    def __post_init__(self):
        if self.family not in ("constant", "power", "tabulated"):
            raise DomainError(f"unknown omega family {self.family!r}")
        if self.family == "constant" and self.sigma <= 0:
            raise DomainError("constant omega requires sigma > 0")
        if self.family == "power":
            if self.a <= 0:
                raise DomainError("power omega requires a > 0")
            if self.alpha < 0.0:
                raise DomainError("power omega requires alpha >= 0")
        if self.family == "tabulated":
            t = np.asarray(self.table_t, dtype=float)
            v = np.asarray(self.table_v, dtype=float)
            if t.size < 2 or t.size != v.size:
                raise DomainError("tabulated omega needs >= 2 (t, value) rows")
            if np.any(np.diff(t) <= 0):
                raise DomainError("tabulated omega times must be strictly increasing")
            if np.any(v <= 0):
                raise DomainError("omega must be positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "constant":
            out = np.full_like(t, self.sigma)
        elif self.family == "power":
            out = self.a * np.power(t, self.alpha)
        else:
            tt = np.asarray(self.table_t, dtype=float)
            vv = np.asarray(self.table_v, dtype=float)
            if np.any(t < tt[0]) or np.any(t > tt[-1]):
                raise InsufficientDataError(
                    "tabulated omega does not cover requested times"
                )
            out = np.interp(t, tt, vv)
        return out if out.ndim else float(out)

    @property
    def theorem1_admissible(self):
        """alpha in [0, 1) with inf omega(t)/t**alpha > 0, as the
        semilinear single-point regime requires; constant omega qualifies
        with alpha = 0."""
        if self.family == "constant":
            return True
        if self.family == "power":
            return 0.0 <= self.alpha < 1.0
        return None  # undecidable for tabulated data

    def check_monotone(self, n=64):
        """Sampled nondecreasing check on (0, t_max]."""
        ts = np.geomspace(self.t_max * 1e-6, self.t_max, n)
        if self.family == "tabulated":
            ts = np.linspace(self.table_t[0], self.table_t[-1], n)
        vals = np.atleast_1d(self(ts))
        return bool(np.all(np.diff(vals) >= -1e-12))

    def describe(self):
        if self.family == "constant":
            return f"constant:sigma={self.sigma}"
        if self.family == "power":
            return f"power:a={self.a},alpha={self.alpha}"
        return f"tabulated[{len(self.table_t)}]"


# ---------------------------------------------------------------------------
# absorption kernels
# ---------------------------------------------------------------------------

_FAMILIES = (
    "exp-omega",
    "double-exp",
    "lemma1",
    "porous-threshold",
    "constant",
    "power",
    "tabulated",
)


@dataclass(frozen=True)
class AbsorptionKernel:
    """A member of the built-in h(t) families.

    ``exp-omega``        h(t) = exp(-omega(t)/t)
    ``double-exp``       h(t) = exp(-exp(omega(t)/t))
    ``lemma1``           h(t) = sigma * t**-2 * exp(sigma/t) * exp(-exp(sigma/t))
    ``porous-threshold`` h(t) = t**((q-m)/(m-1)) / omega(t)
    ``constant``         h(t) = value  (value = 0 allowed as a test fixture)
    ``power``            h(t) = coeff * t**expo
    ``tabulated``        piecewise-linear two-column table

    The lemma1 family has the exact primitive H(t) = exp(-exp(sigma/t)).
    """

    family: str
    omega: OmegaSpec | None = None
    sigma: float = 1.0
    value: float = 1.0
    coeff: float = 1.0
    expo: float = 0.0
    m: float = 2.0
    q: float = 3.0
    table_t: tuple = ()
    table_v: tuple = ()

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown kernel family {self.family!r}")
        if self.family in ("exp-omega", "double-exp", "porous-threshold"):
            if self.omega is None:
                raise DomainError(f"{self.family} kernel requires an omega spec")
        if self.family == "lemma1" and self.sigma <= 0:
            raise DomainError("lemma1 kernel requires sigma > 0")
        if self.family == "constant" and self.value < 0:
            raise DomainError("constant kernel requires value >= 0")
        if self.family == "porous-threshold" and not self.q > self.m > 1:
            raise DomainError("porous-threshold kernel requires q > m > 1")
        if self.family == "tabulated":
            t = np.asarray(self.table_t, dtype=float)
            v = np.asarray(self.table_v, dtype=float)
            if t.size < 2 or t.size != v.size:
                raise DomainError("tabulated kernel needs >= 2 (t, value) rows")
            if np.any(np.diff(t) <= 0):
                raise DomainError("tabulated kernel times must be strictly increasing")
            if np.any(v < 0):
                raise DomainError("kernel values must be nonnegative")

    # -- constructors -------------------------------------------------------

    @classmethod
    def exp_omega(cls, omega):
        return cls(family="exp-omega", omega=omega)

    @classmethod
    def double_exp(cls, omega):
        return cls(family="double-exp", omega=omega)

    @classmethod
    def lemma1_kernel(cls, sigma):
        return cls(family="lemma1", sigma=sigma)

    @classmethod
    def porous_threshold(cls, m, q, omega):
        return cls(family="porous-threshold", omega=omega, m=m, q=q)

    @classmethod
    def constant(cls, value):
        return cls(family="constant", value=value)

    @classmethod
    def power(cls, coeff, expo):
        return cls(family="power", coeff=coeff, expo=expo)

    @classmethod
    def from_csv(cls, path):
        """Ingest a tabulated kernel from two-column CSV (t, value).

        A header row is required and t must be strictly increasing.
        """
        ts, vs = [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise InsufficientDataError(f"empty kernel CSV {path}")
            try:
                float(header[0])
            except (ValueError, IndexError):
                pass
            else:
                raise InsufficientDataError("kernel CSV must start with a header row")
            for row in reader:
                if not row:
                    continue
                ts.append(float(row[0]))
                vs.append(float(row[1]))
        return cls(family="tabulated", table_t=tuple(ts), table_v=tuple(vs))

    # -- evaluation ---------------------------------------------------------

    def log_h(self, t):
        """log h(t); may be -inf when h underflows.  t must be positive."""
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("h(t) requires t > 0")
        with np.errstate(over="ignore", divide="ignore"):
            if self.family == "exp-omega":
                out = -np.asarray(self.omega(t)) / t
            elif self.family == "double-exp":
                out = -np.exp(np.asarray(self.omega(t)) / t)
            elif self.family == "lemma1":
                s = self.sigma
                out = math.log(s) - 2.0 * np.log(t) + s / t - np.exp(s / t)
            elif self.family == "porous-threshold":
                p = (self.q - self.m) / (self.m - 1.0)
                out = p * np.log(t) - np.log(np.asarray(self.omega(t)))
            elif self.family == "constant":
                out = np.full_like(t, math.log(self.value) if self.value > 0 else -np.inf)
            elif self.family == "power":
                out = math.log(self.coeff) + self.expo * np.log(t)
            else:
                tt = np.asarray(self.table_t)
                vv = np.asarray(self.table_v)
                if np.any(t < tt[0]) or np.any(t > tt[-1]):
                    raise InsufficientDataError("tabulated kernel does not cover t")
                v = np.interp(t, tt, vv)
                out = np.where(v > 0, np.log(np.where(v > 0, v, 1.0)), -np.inf)
        return out if out.ndim else float(out)

    def __call__(self, t):
        lh = np.asarray(self.log_h(t))
        with np.errstate(over="ignore"):
            out = np.where(lh < _LOG_TINY, 0.0, np.exp(np.minimum(lh, 709.0)))
        return out if out.ndim else float(out)

    # -- primitive ----------------------------------------------------------

    def log_H(self, r):
        """log of H(r) = int_0^r h, where a closed form exists; else None."""
        if r <= 0:
            raise DomainError("H(r) requires r > 0")
        if self.family == "lemma1":
            return -math.exp(min(self.sigma / r, 709.0))
        if self.family == "constant":
            if self.value == 0.0:
                return -math.inf
            return math.log(self.value) + math.log(r)
        if self.family == "power":
            if self.expo <= -1.0:
                return math.inf
            return (
                math.log(self.coeff)
                + (self.expo + 1.0) * math.log(r)
                - math.log(self.expo + 1.0)
            )
        if self.family == "porous-threshold" and self.omega.family in (
            "constant",
            "power",
        ):
            p = (self.q - self.m) / (self.m - 1.0)
            if self.omega.family == "constant":
                e, c = p, 1.0 / self.omega.sigma
            else:
                e, c = p - self.omega.alpha, 1.0 / self.omega.a
            if e <= -1.0:
                return math.inf
            return math.log(c) + (e + 1.0) * math.log(r) - math.log(e + 1.0)
        return None

    def describe(self):
        if self.family == "constant":
            return f"constant:value={self.value}"
        if self.family == "power":
            return f"power:coeff={self.coeff},expo={self.expo}"
        if self.family == "lemma1":
            return f"lemma1:sigma={self.sigma}"
        if self.family == "porous-threshold":
            return f"porous-threshold:m={self.m},q={self.q},omega={self.omega.describe()}"
        if self.family == "tabulated":
            return f"tabulated[{len(self.table_t)}]"
        return f"{self.family}:omega={self.omega.describe()}"


# ---------------------------------------------------------------------------
# problem specification
# ---------------------------------------------------------------------------

_VARIANTS = ("power", "exponential", "porous", "power-plus-one")


@dataclass(frozen=True)
class ProblemSpec:
    """Equation variant, dimension, kernel and domain for one solve.

    ``power``          du/dt - Lap u + h(t) u**q = 0
    ``exponential``    du/dt - Lap u + h(t) exp(u) = 0
    ``porous``         du/dt - Lap(u**m) + h(t) u**q = 0 with q > m > 1
    ``power-plus-one`` du/dt - Lap u + h(t) (u**q + 1) = 0, the auxiliary
                       equation of the subsolution comparison experiment.
    """

    N: int
    variant: str
    kernel: AbsorptionKernel
    q: float = 2.0
    m: float = 2.0
    R: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}")
        if self.N < 1 or int(self.N) != self.N:
            raise DomainError("dimension N must be an integer >= 1")
        if self.variant in ("power", "porous", "power-plus-one") and self.q <= 1:
            raise DomainError("power-type variants require q > 1")
        if self.variant == "porous" and not self.q > self.m > 1:
            raise DomainError("porous variant requires q > m > 1")
        if self.R <= 0 or self.T <= 0:
            raise DomainError("R and T must be positive")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def eval_h(kernel: AbsorptionKernel, t: float) -> float:
    """h(t) for t > 0; underflow is returned as exact 0.0."""
    if t <= 0:
        raise DomainError("eval_h requires t > 0")
    return float(kernel(t))


def _geometric_panel_quad(f, r, rel_target=1e-8, max_panels=400):
    """Integral of f on (0, r] over geometric panels [2**-(j+1) r, 2**-j r].

    Built for integrands that vanish flatly at t = 0: panels are added
    until one contributes less than 1e-16 of the running total.
    """
    total = 0.0
    err = 0.0
    hi = r
    for _ in range(max_panels):
        lo = hi / 2.0
        val, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-10, limit=200)
        total += val
        err += abs(e)
        if total > 0 and abs(val) < 1e-16 * total:
            return total, err
        if lo < 1e-300 or (total == 0.0 and val == 0.0 and hi < r * 2.0**-40):
            return total, err
        hi = lo
    raise NumericalFailure(
        "H quadrature did not converge within the panel budget",
        estimate=total,
        error_bound=err,
    )


def H_integral(kernel: AbsorptionKernel, r: float) -> float:
    """H(r) = int_0^r h(s) ds, closed form when available else quadrature."""
    if r <= 0:
        raise DomainError("H_integral requires r > 0")
    lH = kernel.log_H(r)
    if lH is not None:
        if lH == math.inf:
            return math.inf
        return 0.0 if lH < _LOG_TINY else math.exp(lH)
    if kernel.family == "porous-threshold":
        # omega(0+) may vanish; probe integrability before quadrature
        p = (kernel.q - kernel.m) / (kernel.m - 1.0)
        ts = np.geomspace(min(r, 1e-6) * 1e-6, r, 24)
        vals = kernel(ts)
        if vals[0] * ts[0] > 10.0 * vals[-1] * ts[-1] and vals[0] > vals[-1]:
            return math.inf
    total, _ = _geometric_panel_quad(kernel, r)
    return total


def eval_U(spec: ProblemSpec, t: float) -> float:
    """Flat supersolution ((q-1) H(t))**(-1/(q-1)); inf signals H underflow."""
    if t <= 0:
        raise DomainError("eval_U requires t > 0")
    if spec.variant == "exponential":
        raise WrongVariantError("eval_U applies to power/porous; use eval_Utilde")
    q = spec.q
    lH = spec.kernel.log_H(t)
    if lH is None:
        H = H_integral(spec.kernel, t)
        if H == 0.0:
            return math.inf
        if H == math.inf:
            return 0.0
        lH = math.log(H)
    if lH == -math.inf:
        return math.inf
    if lH == math.inf:
        return 0.0
    lu = -(math.log(q - 1.0) + lH) / (q - 1.0)
    if lu > 709.0:
        return math.inf
    return math.exp(lu)


def eval_Utilde(spec: ProblemSpec, t: float) -> float:
    """Flat supersolution -ln H(t) of the exponential variant."""
    if t <= 0:
        raise DomainError("eval_Utilde requires t > 0")
    if spec.variant != "exponential":
        raise WrongVariantError("eval_Utilde applies to the exponential variant only")
    lH = spec.kernel.log_H(t)
    if lH is None:
        H = H_integral(spec.kernel, t)
        if H == 0.0:
            return math.inf
        lH = math.log(H)
    return -lH


# ---------------------------------------------------------------------------
# Dini classification and exponents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiniResult:
    kind: str  # "finite" | "divergent" | "undecided"
    value: float | None = None
    increments: tuple = ()

    @property
    def finite(self):
        return self.kind == "finite"


def dini_classify(omega: OmegaSpec, exponent: float, cutoffs=None) -> DiniResult:
    """Classify int_0^1 omega(t)**exponent / t dt.

    Analytic families are classified exactly; tabulated omega uses the
    documented increment heuristic over the cutoff schedule and is
    explicitly best-effort (an improper integral cannot be decided
    numerically).
    """
    if not 0.0 < exponent <= 1.0:
        raise DomainError("exponent must lie in (0, 1]")
    if omega.family == "constant":
        return DiniResult("divergent")
    if omega.family == "power":
        ae = omega.alpha * exponent
        if ae <= 0.0:
            return DiniResult("divergent")
        return DiniResult("finite", value=omega.a**exponent / ae)

    if cutoffs is None:
        cutoffs = [2.0 ** -(j + 1) for j in range(18)]
    cutoffs = sorted(set(float(c) for c in cutoffs), reverse=True)
    if len(cutoffs) < 5:
        raise DomainError("cutoff schedule needs at least 5 decreasing values")
    t0 = omega.table_t[0]
    if cutoffs[-1] < t0 or omega.table_t[-1] < 1.0:
        raise InsufficientDataError(
            "tabulated omega does not cover the cutoff range (need (eps_min, 1])"
        )

    def integrand(t):
        return np.atleast_1d(omega(t)) ** exponent / t

    increments = []
    hi = 1.0
    for eps in cutoffs:
        val, _ = integrate.quad(lambda s: float(integrand(s)), eps, hi, limit=200)
        increments.append(val)
        hi = eps
    inc = np.array(increments[1:])  # per-cutoff increments
    last = inc[-4:]
    total = sum(increments)
    if np.all(np.diff(last) >= -1e-14):
        return DiniResult("divergent", increments=tuple(increments))
    ratios = last[1:] / np.where(last[:-1] > 0, last[:-1], 1.0)
    if np.all(ratios <= 0.9):
        return DiniResult("finite", value=total, increments=tuple(increments))
    return DiniResult("undecided", increments=tuple(increments))


def theta_exponent(m: float, q: float, N: int) -> float:
    """Dini exponent of the degenerate-diffusion threshold."""
    if not q > m > 1:
        raise DomainError("theta_exponent requires q > m > 1")
    if N < 1:
        raise DomainError("N must be >= 1")
    th = (m * m - 1.0) / ((N * (m - 1.0) + 2.0 * (m + 1.0)) * (q - 1.0))
    assert 0.0 < th < 1.0
    return th


def alpha_ell(N: int, ell: float) -> float:
    """Exponent making the self-similar ansatz close the weighted equation."""
    if ell <= 1.0:
        raise DomainError("alpha_ell requires ell > 1")
    if N < 1:
        raise DomainError("N must be >= 1")
    return (ell - 1.0) * (N + 2.0) / 2.0 - 1.0


def ell_star(N: int) -> float:
    """The exponent at which the time weight disappears (alpha = 0)."""
    return (N + 4.0) / (N + 2.0)


def lemma1_constant(sigma: float, tau: float, ell: float, N: int) -> float:
    """Amplitude constant of the auxiliary subsolution equation.

    Includes the kernel prefactor sigma, which makes the inequality scan
    pass on (0, beta*sigma] with beta independent of sigma.
    """
    if sigma <= 0 or tau <= 0:
        raise DomainError("sigma and tau must be positive")
    if ell <= 1.0:
        raise DomainError("ell must exceed 1")
    log_c = (
        math.log(sigma)
        + (1.0 - ell) * sigma / tau
        - 0.5 * (ell * (N + 2.0) - N) * math.log(tau)
    )
    return math.exp(log_c)


# ---------------------------------------------------------------------------
# subsolution inequality scan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanResult:
    holds: bool
    witness: tuple | None = None  # first failing (t, rho)
    margin: float = math.nan  # min of log lhs - log rhs over the grid


def _scan_margins(sigma, tau, ell, N, t_nodes, s_nodes):
    """log(lhs) - log(rhs) of the subsolution inequality on a (t, s) grid.

    rho is parameterized as s * Utilde(t) with Utilde(t) = exp(sigma/t),
    so the scan stays in log space even where rho overflows a float.
    """
    c = lemma1_constant(sigma, tau, ell, N)
    a = alpha_ell(N, ell)
    log_c = math.log(c)
    t = t_nodes[:, None]
    s = s_nodes[None, :]
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        g = sigma / t  # gamma(t)
        E = np.exp(g)  # Utilde(t); may overflow to inf
        log_rho = np.where(s > 0, np.log(np.where(s > 0, s, 1.0)) + g, -np.inf)
        lhs = log_c + a * np.log(t) + np.logaddexp(ell * log_rho, 0.0)
        tail = np.where(s >= 1.0, 0.0, (s - 1.0) * E)  # (s-1)*inf -> -inf is wanted
        rhs = math.log(sigma) - 2.0 * np.log(t) + g + tail
    return lhs - rhs


def verify_subsolution_inequality(
    sigma: float,
    tau: float,
    ell: float,
    N: int,
    n_t: int = 80,
    n_rho: int = 40,
    t_min: float | None = None,
    boundary_only: bool = False,
) -> ScanResult:
    """Scan c*t**a*(rho**ell + 1) >= h(t)*exp(rho) on (0,tau] x [0,Utilde(t)].

    The t grid is logarithmic on [t_min, tau], the rho grid linear per
    t-node.  ``boundary_only`` restricts the scan to the rho = Utilde(t)
    row, which is where the inequality is tightest.
    """
    if n_t < 1 or n_rho < 2:
        raise DomainError("scan grid must be nonempty")
    if t_min is None:
        t_min = tau * 1e-3
    t_nodes = np.geomspace(t_min, tau, n_t)
    s_nodes = np.array([1.0]) if boundary_only else np.linspace(0.0, 1.0, n_rho)
    margins = _scan_margins(sigma, tau, ell, N, t_nodes, s_nodes)
    ok = margins >= -1e-12
    if np.all(ok):
        return ScanResult(True, margin=float(np.min(margins)))
    it, irho = np.argwhere(~ok)[0]
    t_w = float(t_nodes[it])
    with np.errstate(over="ignore"):
        rho_w = float(s_nodes[irho] * math.exp(min(sigma / t_w, 709.0)))
    return ScanResult(False, witness=(t_w, rho_w), margin=float(np.min(margins)))


def find_beta(
    sigma: float,
    ell: float,
    N: int,
    bracket: tuple = None,
    tol: float = 1e-4,
    **scan_kw,
) -> float:
    """Largest tau (as beta = tau/sigma) for which the scan holds.

    Bisection on the holds/fails predicate over the tau bracket.
    """
    if bracket is None:
        bracket = (1e-2 * sigma, 4.0 * sigma)
    lo, hi = bracket
    if lo > hi:
        raise DomainError("degenerate bracket must satisfy lo <= hi")

    def holds(tau):
        return verify_subsolution_inequality(sigma, tau, ell, N, **scan_kw).holds

    if not holds(lo):
        raise NotFoundError(
            f"no passing tau found in bracket [{lo}, {hi}] for sigma={sigma}"
        )
    if lo == hi or holds(hi):
        return hi / sigma
    while hi - lo > tol * sigma:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return lo / sigma
