"""
Shared fixtures: a FULL-mode binary source and a BSC auxiliary channel.
"""
import pytest

from pyHTSecrecy.probcore import CondPmf, EveMode, Pmf, SourceModel, binary_erasure_channel
from pyHTSecrecy.region import AuxChannel


@pytest.fixture(scope="session")
def full_source():
    # Z is X through a BSC whose crossover is 0.1, or 0.3 when Bob's symbol is erased
    rows = [
        [0.9, 0.1],
        [0.9, 0.1],
        [0.7, 0.3],
        [0.1, 0.9],
        [0.1, 0.9],
        [0.3, 0.7],
    ]
    return SourceModel(
        Pmf([0.8, 0.2]),
        binary_erasure_channel(0.4),
        EveMode.FULL,
        pzxy=CondPmf(rows),
        name="binary_full",
    )


@pytest.fixture(scope="session")
def bsc_aux():
    return AuxChannel(CondPmf([[0.9, 0.1], [0.1, 0.9]]))
