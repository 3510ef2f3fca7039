"""
Common channels and the worked example source.
"""
import numpy as np

from pyHTSecrecy.probcore.distributions import (
    Alphabet,
    CondPmf,
    EveMode,
    Pmf,
    SourceModel,
)

BINARY = Alphabet(2, ("0", "1"))
#: Output alphabet of the erasure channel; the erasure symbol is last.
ERASURE_OUTPUT = Alphabet(3, ("0", "1", "e"))


def binary_symmetric_channel(p):
    """BSC with crossover probability ``p``."""
    return CondPmf([[1 - p, p], [p, 1 - p]], BINARY, BINARY)


def binary_erasure_channel(p):
    """BEC with erasure probability ``p``; outputs are ordered ``0, 1, e``."""
    return CondPmf([[1 - p, 0.0, p], [0.0, 1 - p, p]], BINARY, ERASURE_OUTPUT)


def identity_channel(k):
    """Noiseless channel on ``k`` symbols."""
    return CondPmf(np.eye(k))


def constant_channel(k_in, k_out=1, symbol=0):
    """Channel whose output is always ``symbol`` (the output carries no information)."""
    rows = np.zeros((k_in, k_out))
    rows[:, symbol] = 1.0
    return CondPmf(rows)


def example_source(p0=0.8, erasure=0.4, crossover_h0=0.2, crossover_h1=0.3):
    """
    The binary worked example: :math:`P_X(0)=0.8`, :math:`Y` through BEC(0.4), :math:`Z`
    through BSC(0.2) under H0 and BSC(0.3) under H1.

    Only the eavesdropper marginals are specified, so the model is in ``MARGINAL`` mode.
    """
    return SourceModel(
        px=Pmf([p0, 1 - p0], BINARY),
        pyx=binary_erasure_channel(erasure),
        eve_mode=EveMode.MARGINAL,
        pzx_h0=binary_symmetric_channel(crossover_h0),
        qzx_h1=binary_symmetric_channel(crossover_h1),
        name="example_fig2",
    )
