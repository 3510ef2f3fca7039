"""
Tests of the single-letter region quantities.
"""
import numpy as np
import pytest

from pyHTSecrecy.probcore import (
    CondPmf,
    EveMode,
    Pmf,
    SourceModel,
    binary_erasure_channel,
    example_source,
)
from pyHTSecrecy.region import (
    AuxChannel,
    RegionEvaluator,
    build_joint_h0,
    build_joint_h1,
    evaluate_point,
)
from pyHTSecrecy.utility.exceptions import DimensionError


def _random_model(rng, full=False):
    x, y, z = 2, rng.integers(2, 4), rng.integers(2, 4)
    px = Pmf(rng.dirichlet(np.ones(x)))
    pyx = CondPmf(rng.dirichlet(np.ones(y), size=x))
    if full:
        return SourceModel(px, pyx, EveMode.FULL, pzxy=CondPmf(rng.dirichlet(np.ones(z), size=x * y)))
    return SourceModel(
        px,
        pyx,
        EveMode.MARGINAL,
        pzx_h0=CondPmf(rng.dirichlet(np.ones(z), size=x)),
        qzx_h1=CondPmf(rng.dirichlet(np.ones(z), size=x)),
    )


@pytest.mark.critical
def test_identity_channel_on_example():
    point = evaluate_point(example_source(), AuxChannel.identity(2), 0.2)
    assert point.rate_needed == pytest.approx(0.72193, abs=1e-4)
    assert point.exponent == pytest.approx(0.43316, abs=1e-4)
    assert point.h_p_x_given_uz == pytest.approx(0.0, abs=1e-12)
    assert point.delta0_cap == pytest.approx(0.2 * 0.53947, abs=1e-4)


@pytest.mark.critical
def test_constant_channel_keeps_full_equivocation():
    point = evaluate_point(example_source(), AuxChannel.constant(2), 0.2)
    assert point.rate_needed == pytest.approx(0.0, abs=1e-12)
    assert point.exponent == pytest.approx(0.0, abs=1e-12)
    assert point.delta0_cap == pytest.approx(0.53947, abs=1e-4)
    assert point.delta1_cap == pytest.approx(0.64518, abs=1e-4)


def test_joints_have_uxyz_axes_and_independent_h1():
    model = example_source()
    aux = AuxChannel(CondPmf([[0.9, 0.1], [0.3, 0.7]]))
    p, q = build_joint_h0(model, aux), build_joint_h1(model, aux)
    assert p.names == ("U", "X", "Y", "Z") == q.names
    xy = q.marginal(["X", "Y"]).mass
    assert xy == pytest.approx(np.outer(model.px.probs, model.py.probs), abs=1e-12)
    assert p.marginal(["U", "X"]).mass == pytest.approx(q.marginal(["U", "X"]).mass, abs=1e-12)


def test_dimension_and_epsilon_checks():
    with pytest.raises(DimensionError):
        evaluate_point(example_source(), AuxChannel.identity(3), 0.0)
    with pytest.raises(ValueError):
        evaluate_point(example_source(), AuxChannel.identity(2), 1.0)


def test_padded_channel_is_equivalent():
    model = example_source()
    aux = AuxChannel(CondPmf([[0.9, 0.1], [0.3, 0.7]]))
    a, b = evaluate_point(model, aux, 0.1), evaluate_point(model, aux.padded(4), 0.1)
    assert a.to_dict() == pytest.approx(b.to_dict(), abs=1e-12)
    with pytest.raises(DimensionError):
        aux.padded(1)


@pytest.mark.critical
@pytest.mark.parametrize("full", [False, True])
def test_batched_evaluator_matches_reference(full):
    rng = np.random.default_rng(5 + full)
    for _ in range(40):
        model = _random_model(rng, full)
        ev = RegionEvaluator(model)
        u = int(rng.integers(1, 5))
        eps = float(rng.uniform(0, 0.9))
        batch = rng.dirichlet(np.ones(u), size=(3, model.x_size))
        qty = ev.quantities(batch, eps)
        for i in range(3):
            point = evaluate_point(model, AuxChannel(CondPmf(batch[i])), eps)
            for key in ("rate_needed", "exponent", "delta0_cap", "delta1_cap"):
                assert qty[key][i] == pytest.approx(getattr(point, key), abs=1e-9)


def test_evaluator_caps():
    ev = RegionEvaluator(example_source())
    assert ev.h_p_x_given_z == pytest.approx(0.53947, abs=1e-4)
    assert ev.h_q_x_given_z == pytest.approx(0.64518, abs=1e-4)
    assert ev.i_xy == pytest.approx(0.6 * ev.h_x, abs=1e-12)


def test_erasure_exponent_scales_rate():
    # through an erasure channel I(U;Y) = (1 - p) I(U;X)
    model = example_source()
    assert model.pyx == binary_erasure_channel(0.4)
    aux = AuxChannel(CondPmf([[0.8, 0.2], [0.25, 0.75]]))
    point = evaluate_point(model, aux, 0.0)
    assert point.exponent == pytest.approx(0.6 * point.rate_needed, abs=1e-12)
