"""Mass-ladder sweeps and the desk-scale blow-up classifier."""

import math

import numpy as np
import pytest

from diffabs import (
    AbsorptionKernel,
    DomainError,
    IncompleteSweepError,
    OmegaSpec,
    ProblemSpec,
    RadialGrid,
    SolverOptions,
    SweepTable,
    classify,
    porous_sweep,
    sweep,
)

OPTS = SolverOptions(rtol=1e-4, atol=1e-8)
PROBES = ((0.5, 0.05), (1.0, 0.05))
LADDER = [1e1, 1e2, 1e3, 1e4]


def _spec(kernel, variant="power", q=2.0, m=2.0):
    return ProblemSpec(N=1, variant=variant, kernel=kernel, q=q, m=m,
                      R=4.0, T=0.06)


def _grid():
    return RadialGrid.graded(4.0, 120, 1, stretch=1.05)


def test_sweep_free_diffusion_grows_linearly():
    # h = 0: probe values are exactly k * G(x0, t0), growth by 10x per rung
    spec = _spec(AbsorptionKernel.constant(0.0))
    table = sweep(spec, PROBES, LADDER, _grid(), OPTS)
    assert table.complete
    ratio = table.values[1:] / table.values[:-1]
    assert np.allclose(ratio, 10.0, rtol=1e-6)


def test_sweep_columns_nondecreasing():
    spec = _spec(AbsorptionKernel.exp_omega(OmegaSpec("constant", sigma=1.0)))
    table = sweep(spec, PROBES, LADDER, _grid(), OPTS)
    assert np.all(np.diff(table.values, axis=0) >= -1e-8)


def test_sweep_divergent_H_classifies_complete():
    spec = _spec(AbsorptionKernel.exp_omega(OmegaSpec("constant", sigma=1.0)))
    table = sweep(spec, PROBES, LADDER, _grid(), OPTS)
    verdict = classify(table)
    assert verdict.verdict == "complete"
    assert verdict.dini == "divergent"
    # h = e^{-1/t} is flat at 0: huge but finite flat supersolution, and
    # the probe columns stay far below it
    assert np.all(np.isfinite(table.supersolution))
    assert np.all(table.values[-1] < table.supersolution)


def test_sweep_ladder_validation():
    spec = _spec(AbsorptionKernel.constant(0.0))
    with pytest.raises(DomainError):
        sweep(spec, PROBES, [1e2], _grid(), OPTS)
    with pytest.raises(DomainError):
        sweep(spec, PROBES, [1e2, 1e2], _grid(), OPTS)


def test_sweep_probe_time_validation():
    spec = _spec(AbsorptionKernel.constant(0.0))
    with pytest.raises(DomainError):
        sweep(spec, [(0.5, 1.0)], LADDER, _grid(), OPTS)  # t0 >= T


def test_sweep_refuses_inadmissible_exponential_kernel():
    # exponential variant requires t^{N/2}(-ln h) -> infinity as t -> 0;
    # a constant kernel fails the admissibility screen
    spec = _spec(AbsorptionKernel.constant(1.0), variant="exponential")
    with pytest.raises(DomainError):
        sweep(spec, PROBES, LADDER, _grid(), OPTS)


def test_sweep_incomplete_on_step_budget():
    spec = _spec(AbsorptionKernel.exp_omega(OmegaSpec("constant", sigma=1.0)))
    tiny = SolverOptions(rtol=1e-4, atol=1e-8, max_steps=10)
    table = sweep(spec, PROBES, LADDER, _grid(), tiny)
    assert not table.complete
    assert "StepFailure" in table.failure
    with pytest.raises(IncompleteSweepError):
        classify(table)


def test_classify_needs_four_rungs():
    spec = _spec(AbsorptionKernel.constant(0.0))
    table = sweep(spec, PROBES, [1e1, 1e2, 1e3], _grid(), OPTS)
    with pytest.raises(DomainError):
        classify(table)


def test_classify_single_point_synthetic():
    # a synthetic table: off-origin probes saturated, origin probe growing
    ks = np.array([1e1, 1e2, 1e3, 1e4])
    values = np.column_stack([
        np.array([1.0, 10.0, 100.0, 1000.0]),    # on-origin, growing
        np.array([5.0, 5.0, 5.0, 5.0]),          # off-origin, saturated
    ])
    table = SweepTable(
        spec=None, probes=((0.0, 0.05), (1.0, 0.05)), ks=ks, values=values,
        supersolution=np.array([math.inf, 6.0]), diagnostics=(),
        origin_cell=0.01,
    )
    verdict = classify(table)
    assert verdict.verdict == "single-point"


def test_classify_threshold_override():
    ks = np.array([1e1, 1e2, 1e3, 1e4])
    values = np.column_stack([np.array([1.0, 2.0, 3.0, 3.1])])
    table = SweepTable(
        spec=None, probes=((1.0, 0.05),), ks=ks, values=values,
        supersolution=np.array([math.inf]), diagnostics=(), origin_cell=0.01,
    )
    # 3.3% last increment: saturated under a 5% saturation threshold,
    # growing under a 1% growth threshold
    v_loose = classify(table, thresholds={"saturation": 0.05})
    assert v_loose.verdict == "single-point"
    v_tight = classify(table, thresholds={"growth": 0.01})
    assert v_tight.verdict == "complete"


def test_porous_sweep_validates_variant_and_kernel():
    om = OmegaSpec("power", a=1.0, alpha=7.0 / 3.0)
    kern = AbsorptionKernel.porous_threshold(2.0, 3.0, om)
    good = _spec(kern, variant="porous", q=3.0, m=2.0)
    bad_variant = _spec(kern, variant="power", q=3.0)
    with pytest.raises(DomainError):
        porous_sweep(bad_variant, PROBES, LADDER, _grid(), OPTS)
    bad_kernel = _spec(AbsorptionKernel.exp_omega(OmegaSpec("constant")),
                       variant="porous", q=3.0, m=2.0)
    with pytest.raises(DomainError):
        porous_sweep(bad_kernel, PROBES, LADDER, _grid(), OPTS)
    table = porous_sweep(good, PROBES, LADDER, _grid(), OPTS)
    assert table.complete


def test_porous_threshold_kernel_annihilates_probes():
    # omega = t^{7/3} fails the theta-Dini condition so violently that the
    # field is wiped out at every off-origin probe at desk scale
    om = OmegaSpec("power", a=1.0, alpha=7.0 / 3.0)
    kern = AbsorptionKernel.porous_threshold(2.0, 3.0, om)
    spec = _spec(kern, variant="porous", q=3.0, m=2.0)
    grid = RadialGrid.graded(4.0, 220, 1, stretch=1.03)
    # t0_init small enough that the warm-start tail underflows to zero at
    # the probes: only diffusion-delivered mass is measured
    table = porous_sweep(spec, PROBES, LADDER, grid, OPTS, t0_init=1e-4)
    assert np.all(table.values == 0.0)
    verdict = classify(table)
    assert verdict.verdict == "single-point"
