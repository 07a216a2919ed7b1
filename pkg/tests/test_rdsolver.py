"""Radial reaction-diffusion integrator: oracles and structural checks."""

import math

import numpy as np
import pytest

from diffabs import (
    AbsorptionKernel,
    DomainError,
    InitialData,
    OmegaSpec,
    ProblemSpec,
    RadialGrid,
    SolverOptions,
    heat_kernel,
    probe,
    solve,
    solve_comparison_pair,
)

FAST = SolverOptions(rtol=1e-5, atol=1e-9)


def _spec(kernel, variant="power", N=1, q=2.0, m=2.0, R=1.9, T=0.1):
    return ProblemSpec(N=N, variant=variant, kernel=kernel, q=q, m=m, R=R, T=T)


def _grid(spec, M=240, stretch=1.02):
    return RadialGrid.graded(spec.R, M, spec.N, stretch=stretch)


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------

def test_grid_volumes_fill_the_ball():
    for N in (1, 2, 3):
        g = RadialGrid.graded(2.0, 80, N, stretch=1.03)
        vol = math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0) * 2.0**N
        assert g.volumes.sum() == pytest.approx(vol, rel=1e-12)


def test_grid_mass_of_constant_field():
    g = RadialGrid.graded(1.0, 60, 3)
    u = np.ones_like(g.r)
    ball = 4.0 / 3.0 * math.pi
    assert g.mass(u) == pytest.approx(ball, rel=1e-12)


def test_laplacian_annihilates_constants():
    g = RadialGrid.graded(1.0, 60, 2)
    lo, di, up = g.laplacian_tridiag()
    u = np.ones(di.size)
    # rows not touching the Dirichlet boundary must annihilate constants
    Lu = di * u
    Lu[:-1] += up[:-1] * u[1:]
    Lu[1:] += lo[1:] * u[:-1]
    assert np.max(np.abs(Lu[:-1])) < 1e-10


# ---------------------------------------------------------------------------
# heat-kernel oracle (absorption off)
# ---------------------------------------------------------------------------

def test_heat_kernel_accuracy():
    spec = _spec(AbsorptionKernel.constant(0.0))
    grid = _grid(spec)
    init = InitialData("warm-start", k=1.0, t0=0.01)
    res = solve(spec, init, grid, FAST, snapshots=[0.05, 0.1])
    exact = heat_kernel(1, grid.r, 0.1)
    err = np.max(np.abs(res.fields[-1] - exact)) / np.max(exact)
    assert err < 1e-2


def test_heat_kernel_mass_nonincreasing():
    spec = _spec(AbsorptionKernel.constant(0.0))
    grid = _grid(spec, M=160)
    init = InitialData("warm-start", k=1.0, t0=0.01)
    res = solve(spec, init, grid, FAST, snapshots=list(np.linspace(0.02, 0.1, 5)))
    mass = res.mass_series()
    assert np.all(np.diff(mass) <= 1e-10)


# ---------------------------------------------------------------------------
# flat ODE reductions (machine-exact with the exact absorption flow)
# ---------------------------------------------------------------------------

def test_flat_power_ode_reduction():
    A = 2.0
    spec = ProblemSpec(N=1, variant="power", kernel=AbsorptionKernel.constant(1.0),
                      q=2.0, R=12.0, T=1.0)
    grid = RadialGrid.graded(12.0, 120, 1, stretch=1.05)
    init = InitialData("flat", A=A)
    res = solve(spec, init, grid, FAST, snapshots=[0.1, 0.5, 1.0])
    for t, u in zip(res.times, res.fields):
        expected = A / (1.0 + A * t)
        assert u[0] == pytest.approx(expected, rel=1e-6)


def test_flat_exponential_ode_reduction():
    A = 1.0
    spec = ProblemSpec(N=1, variant="exponential",
                      kernel=AbsorptionKernel.constant(1.0), R=12.0, T=1.0)
    grid = RadialGrid.graded(12.0, 120, 1, stretch=1.05)
    init = InitialData("flat", A=A)
    res = solve(spec, init, grid, SolverOptions(rtol=1e-5, atol=1e-9),
                snapshots=[0.1, 0.5, 1.0])
    for t, u in zip(res.times, res.fields):
        expected = -math.log(math.exp(-A) + t)
        assert u[0] == pytest.approx(expected, abs=1e-6)


# ---------------------------------------------------------------------------
# comparison structure
# ---------------------------------------------------------------------------

def test_comparison_pair_ordering():
    # u solves the plain equation, v the equation with the extra +h(t)
    # absorption: u >= v nodewise on the shared step schedule
    kernel = AbsorptionKernel.constant(1.0)
    spec = ProblemSpec(N=1, variant="power", kernel=kernel, q=2.0, R=1.9, T=0.1)
    spec2 = ProblemSpec(N=1, variant="power-plus-one", kernel=kernel, q=2.0,
                       R=1.9, T=0.1)
    grid = _grid(spec, M=140)
    init = InitialData("warm-start", k=1.0, t0=0.01)
    _, _, report = solve_comparison_pair(spec, spec2, init, grid, FAST,
                                         snapshots=[0.05, 0.1])
    assert report["min_difference"] >= -1e-12


def test_mass_ladder_ordering_under_replay():
    # two masses on the identical step schedule stay ordered nodewise
    spec = _spec(AbsorptionKernel.exp_omega(OmegaSpec("constant", sigma=1.0)),
                 T=0.06, R=4.0)
    grid = RadialGrid.graded(4.0, 120, 1, stretch=1.05)
    snaps = [0.05, 0.06]
    hi = solve(spec, InitialData("warm-start", k=100.0, t0=1e-3), grid,
               SolverOptions(rtol=1e-4, atol=1e-8), snaps)
    replay = SolverOptions(rtol=1e-4, atol=1e-8, fixed_steps=hi.accepted_steps)
    lo = solve(spec, InitialData("warm-start", k=10.0, t0=1e-3), grid,
               replay, snaps)
    assert np.min(hi.fields - lo.fields) >= 0.0


def test_replay_reproduces_driver():
    spec = _spec(AbsorptionKernel.constant(1.0))
    grid = _grid(spec, M=120)
    init = InitialData("warm-start", k=1.0, t0=0.01)
    a = solve(spec, init, grid, FAST, snapshots=[0.1])
    replay = SolverOptions(rtol=1e-5, atol=1e-9, fixed_steps=a.accepted_steps)
    b = solve(spec, init, grid, replay, snapshots=[0.1])
    assert np.array_equal(a.fields, b.fields)


def test_supersolution_monitor_ratio_below_one():
    spec = _spec(AbsorptionKernel.constant(1.0))
    grid = _grid(spec, M=120)
    init = InitialData("warm-start", k=1.0, t0=0.01)
    res = solve(spec, init, grid, FAST, snapshots=[0.1])
    assert res.diagnostics["max_supersolution_ratio"] <= 1.0 + 1e-6


# ---------------------------------------------------------------------------
# porous variant
# ---------------------------------------------------------------------------

def test_porous_mass_conserved_without_absorption():
    spec = ProblemSpec(N=1, variant="porous", kernel=AbsorptionKernel.constant(0.0),
                      q=3.0, m=2.0, R=4.0, T=0.1)
    grid = RadialGrid.graded(4.0, 160, 1, stretch=1.03)
    init = InitialData("bump", k=4.0, Mk=1.0)
    res = solve(spec, init, grid, SolverOptions(rtol=1e-4, atol=1e-8),
                snapshots=[0.05, 0.1])
    mass = res.mass_series()
    assert abs(mass[-1] - mass[0]) / mass[0] < 1e-8


def test_porous_barenblatt_shape():
    # m=2, N=1 source solution; the front kink limits pointwise accuracy,
    # so this is a coarse shape check, not a convergence statement
    m, N = 2.0, 1
    spec = ProblemSpec(N=N, variant="porous", kernel=AbsorptionKernel.constant(0.0),
                      q=3.0, m=m, R=4.0, T=0.5)
    grid = RadialGrid.graded(4.0, 200, N, stretch=1.02)
    init = InitialData("bump", k=6.0, Mk=1.0)
    res = solve(spec, init, grid, SolverOptions(rtol=1e-4, atol=1e-8),
                snapshots=[0.5])
    u = res.fields[-1]
    # self-similar exponents for the source solution of u_t = (u^m)_xx
    alpha = 1.0 / (m + 1.0)
    tt = 0.5
    mass = grid.mass(init.build(grid))
    # Barenblatt: u = t^-alpha (C - kappa xi^2)_+^{1/(m-1)}, xi = x t^-alpha
    kappa = (m - 1.0) * alpha / (2.0 * m)
    xi = grid.r * tt ** (-alpha)
    # C fixed by the mass
    from scipy.integrate import quad

    def profile_mass(C):
        width = math.sqrt(C / kappa)
        val, _ = quad(lambda s: (C - kappa * s * s) ** (1.0 / (m - 1.0)),
                      -width, width)
        return val

    from scipy.optimize import brentq

    C = brentq(lambda c: profile_mass(c) - mass, 1e-6, 10.0)
    exact = tt ** (-alpha) * np.clip(C - kappa * xi * xi, 0.0, None) ** (
        1.0 / (m - 1.0))
    err = np.max(np.abs(u - exact)) / np.max(exact)
    assert err < 0.2


# ---------------------------------------------------------------------------
# probing and validation
# ---------------------------------------------------------------------------

def test_probe_interpolates_in_space_and_time():
    spec = _spec(AbsorptionKernel.constant(0.0))
    grid = _grid(spec, M=160)
    init = InitialData("warm-start", k=1.0, t0=0.01)
    res = solve(spec, init, grid, FAST, snapshots=[0.05, 0.1])
    v = probe(res, 0.5, 0.1)
    exact = float(heat_kernel(1, np.array([0.5]), 0.1)[0])
    assert v == pytest.approx(exact, rel=2e-2)
    mid = probe(res, 0.5, 0.075)
    assert min(probe(res, 0.5, 0.05), v) <= mid <= max(probe(res, 0.5, 0.05), v)


def test_probe_outside_range_rejected():
    spec = _spec(AbsorptionKernel.constant(0.0))
    grid = _grid(spec, M=160)
    res = solve(spec, InitialData("warm-start", k=1.0, t0=0.01), grid, FAST,
                snapshots=[0.1])
    with pytest.raises(DomainError):
        probe(res, 100.0, 0.1)


def test_unresolved_initial_data_rejected():
    spec = _spec(AbsorptionKernel.constant(0.0))
    grid = RadialGrid.graded(1.9, 20, 1)
    with pytest.raises(DomainError):
        solve(spec, InitialData("warm-start", k=1.0, t0=1e-6), grid, FAST,
              snapshots=[0.1])


def test_grid_spec_dimension_mismatch_rejected():
    spec = _spec(AbsorptionKernel.constant(0.0), N=2)
    grid = RadialGrid.graded(1.9, 80, 1)
    with pytest.raises(DomainError):
        solve(spec, InitialData("flat", A=1.0), grid, FAST, snapshots=[0.1])
