"""
Tests of the probability objects and the source model.
"""
import numpy as np
import pytest

from pyHTSecrecy.probcore import (
    Alphabet,
    CondPmf,
    EveMode,
    Hypothesis,
    JointPmf,
    Pmf,
    SourceModel,
    binary_erasure_channel,
    binary_symmetric_channel,
    compose,
    example_source,
)
from pyHTSecrecy.utility.exceptions import DimensionError, ProbabilityError


@pytest.mark.critical
def test_pmf_validation():
    with pytest.raises(ProbabilityError):
        Pmf([0.6, 0.6])
    with pytest.raises(ProbabilityError):
        Pmf([1.2, -0.2])
    with pytest.raises(DimensionError):
        Pmf([])
    p = Pmf([0.5, 0.5 + 1e-12])
    assert p.probs.sum() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        p.probs[0] = 0.3


def test_alphabet_labels():
    a = Alphabet(3, ("0", "1", "e"))
    assert a.label(2) == "e"
    with pytest.raises(DimensionError):
        Alphabet(2, ("a", "a"))
    with pytest.raises(DimensionError):
        Alphabet(0)


def test_cond_pmf_rows():
    c = binary_erasure_channel(0.4)
    assert c.n_in == 2 and c.n_out == 3
    assert c.row(0).probs == pytest.approx([0.6, 0.0, 0.4])
    with pytest.raises(ProbabilityError):
        CondPmf([[0.5, 0.4], [0.5, 0.5]])


@pytest.mark.critical
def test_compose_marginal_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(50):
        px = Pmf(rng.dirichlet(np.ones(3)))
        c = CondPmf(rng.dirichlet(np.ones(4), size=3))
        j = compose(JointPmf.from_pmf(px, "X"), c, ["X"], "Y")
        assert j.marginal(["X"]).mass == pytest.approx(px.probs, abs=1e-12)
        assert j.conditional("Y", "X").matrix == pytest.approx(c.matrix, abs=1e-12)
        assert j.reorder(["Y", "X"]).mass == pytest.approx(j.mass.T, abs=0)


def test_conditional_zero_mass_rows_are_uniform():
    j = JointPmf([[0.5, 0.5], [0.0, 0.0]], ["X", "Y"])
    assert j.conditional("Y", "X").matrix[1] == pytest.approx([0.5, 0.5])


def test_joint_axis_errors():
    j = JointPmf(np.full((2, 2), 0.25), ["X", "Y"])
    with pytest.raises(DimensionError):
        j.marginal(["Z"])
    with pytest.raises(DimensionError):
        j.conditional("X", "X")
    with pytest.raises(DimensionError):
        JointPmf(np.full((2, 2), 0.25), ["X", "X"])


@pytest.mark.critical
def test_example_source_marginals():
    model = example_source()
    assert model.eve_mode is EveMode.MARGINAL
    assert model.py.probs == pytest.approx([0.48, 0.12, 0.4])
    xz = model.joint_xz(Hypothesis.H1).mass
    assert xz == pytest.approx([[0.56, 0.24], [0.06, 0.14]])


def test_full_mode_derives_eavesdropper_marginals():
    pyx = binary_erasure_channel(0.4)
    rows = np.tile(binary_symmetric_channel(0.2).matrix, (1, 3)).reshape(6, 2)
    model = SourceModel(Pmf([0.8, 0.2]), pyx, EveMode.FULL, pzxy=CondPmf(rows))
    assert model.pzx_h0.matrix == pytest.approx(binary_symmetric_channel(0.2).matrix)
    assert model.qzx_h1.matrix == pytest.approx(binary_symmetric_channel(0.2).matrix)


def test_source_model_mode_errors():
    pyx = binary_erasure_channel(0.4)
    bsc = binary_symmetric_channel(0.2)
    with pytest.raises(DimensionError):
        SourceModel(Pmf([0.8, 0.2]), pyx, EveMode.FULL)
    with pytest.raises(DimensionError):
        SourceModel(Pmf([0.8, 0.2]), pyx, EveMode.MARGINAL, pzx_h0=bsc)
    with pytest.raises(DimensionError):
        SourceModel(Pmf([0.8, 0.2]), pyx, EveMode.FULL, pzxy=bsc)
