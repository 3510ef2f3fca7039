"""
Single-letter evaluation of the rate / exponent / equivocation region.

For an auxiliary channel :math:`P_{U|X}` the region is described by four numbers:

- the rate it needs, :math:`I_P(U;X)`;
- the type-II exponent it buys, :math:`I_P(U;Y)`;
- the equivocation caps under both hypotheses,
  :math:`(1-\\epsilon)H_P(X|UZ) + \\epsilon H_P(X|Z)` and
  :math:`(1-\\epsilon)H_Q(X|UZ) + \\epsilon H_Q(X|Z)`.

The :math:`P` joint is :math:`P_{U|X}P_{XYZ}` and the :math:`Q` joint is
:math:`P_{U|X}P_XP_YP_{Z|XY}`. Only the :math:`(U,X,Y)` and :math:`(U,X,Z)` marginals
enter, so MARGINAL source models are evaluated exactly.
"""
from dataclasses import asdict, dataclass

import numpy as np

from pyHTSecrecy.probcore import (
    CondPmf,
    Hypothesis,
    SourceModel,
    compose,
    conditional_entropy,
    constant_channel,
    entropy_bits,
    identity_channel,
    mutual_information,
)
from pyHTSecrecy.utility.exceptions import DimensionError


@dataclass(frozen=True)
class AuxChannel:
    """
    Auxiliary channel :math:`P_{U|X}` (rows indexed by ``x``).
    """

    pux: CondPmf

    def __post_init__(self):
        if not isinstance(self.pux, CondPmf):
            object.__setattr__(self, "pux", CondPmf(self.pux))

    @property
    def u_size(self):
        return self.pux.n_out

    @property
    def x_size(self):
        return self.pux.n_in

    @property
    def matrix(self):
        return self.pux.matrix

    @classmethod
    def constant(cls, x_size, u_size=1):
        """:math:`U` constant (always symbol 0)."""
        return cls(constant_channel(x_size, u_size))

    @classmethod
    def identity(cls, x_size):
        """:math:`U = X`."""
        return cls(identity_channel(x_size))

    def padded(self, u_size):
        """The same channel over a larger :math:`U` alphabet (new symbols unused)."""
        if u_size < self.u_size:
            raise DimensionError(f"Cannot shrink |U| from {self.u_size} to {u_size}.")
        rows = np.zeros((self.x_size, u_size))
        rows[:, : self.u_size] = self.matrix
        return AuxChannel(CondPmf(rows))


@dataclass(frozen=True)
class RegionPoint:
    """
    The region quantities of one auxiliary channel at one :math:`\\epsilon` (all in bits).
    """

    rate_needed: float
    exponent: float
    delta0_cap: float
    delta1_cap: float
    epsilon: float
    h_p_x_given_uz: float
    h_q_x_given_uz: float
    h_p_x_given_z: float
    h_q_x_given_z: float

    def to_dict(self):
        return asdict(self)


def _check_aux(model, aux):
    if aux.x_size != model.x_size:
        raise DimensionError(
            f"Auxiliary channel has {aux.x_size} input rows, |X| = {model.x_size}."
        )


def _build_joint(model, aux, hypothesis):
    _check_aux(model, aux)
    xyz = model.joint_xyz(hypothesis)
    return compose(xyz, aux.pux, ["X"], "U").reorder(["U", "X", "Y", "Z"])


def build_joint_h0(model: SourceModel, aux: AuxChannel):
    """
    :math:`P_{UXYZ} = P_{U|X} P_{XYZ}` with axes ``(U, X, Y, Z)``.

    In MARGINAL mode :math:`Z` is attached through :math:`P_{Z|X}`; the :math:`(U,X,Y)` and
    :math:`(U,X,Z)` marginals are exact.
    """
    return _build_joint(model, aux, Hypothesis.H0)


def build_joint_h1(model: SourceModel, aux: AuxChannel):
    """
    :math:`Q_{UXYZ} = P_{U|X} P_X P_Y P_{Z|XY}` with axes ``(U, X, Y, Z)``.
    """
    return _build_joint(model, aux, Hypothesis.H1)


def evaluate_point(model: SourceModel, aux: AuxChannel, epsilon: float):
    """
    Evaluate the region quantities of ``aux`` at type-I level ``epsilon``.

    Parameters
    ----------
    model: SourceModel
        The source (either eavesdropper mode).
    aux: AuxChannel
        The auxiliary channel.
    epsilon: float
        Type-I error level in ``[0, 1)``.

    Returns
    -------
    RegionPoint
    """
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}.")
    p = build_joint_h0(model, aux)
    q = build_joint_h1(model, aux)

    h_p_uz = conditional_entropy(p, "X", ["U", "Z"])
    h_q_uz = conditional_entropy(q, "X", ["U", "Z"])
    h_p_z = conditional_entropy(p, "X", "Z")
    h_q_z = conditional_entropy(q, "X", "Z")
    return RegionPoint(
        rate_needed=mutual_information(p, "U", "X"),
        exponent=mutual_information(p, "U", "Y"),
        delta0_cap=(1 - epsilon) * h_p_uz + epsilon * h_p_z,
        delta1_cap=(1 - epsilon) * h_q_uz + epsilon * h_q_z,
        epsilon=float(epsilon),
        h_p_x_given_uz=h_p_uz,
        h_q_x_given_uz=h_q_uz,
        h_p_x_given_z=h_p_z,
        h_q_x_given_z=h_q_z,
    )


class RegionEvaluator:
    """
    Batched evaluation of the region quantities for many :math:`P_{U|X}` matrices at once.

    The matrices may carry arbitrary leading batch dimensions, ``(..., |X|, |U|)``. This is
    the inner loop of the optimizer and of the grid oracle; :py:func:`evaluate_point` is the
    reference path it is tested against.

    Parameters
    ----------
    model: SourceModel
        The source model.
    """

    def __init__(self, model: SourceModel):
        self.model = model
        self.px = model.px.probs
        self.p_xy = model.joint_xy(Hypothesis.H0).mass
        self.p_xz = model.joint_xz(Hypothesis.H0).mass
        self.q_xz = model.joint_xz(Hypothesis.H1).mass

        self.h_x = float(entropy_bits(self.px))
        self.h_y = float(entropy_bits(self.p_xy.sum(axis=0)))
        #: :math:`H_P(X|Z)`, the largest achievable H0 cap.
        self.h_p_x_given_z = float(
            entropy_bits(self.p_xz) - entropy_bits(self.p_xz.sum(axis=0))
        )
        #: :math:`H_Q(X|Z)`, the largest achievable H1 cap.
        self.h_q_x_given_z = float(
            entropy_bits(self.q_xz) - entropy_bits(self.q_xz.sum(axis=0))
        )
        #: :math:`I_P(X;Y)`, the largest achievable exponent.
        self.i_xy = float(self.h_x + self.h_y - entropy_bits(self.p_xy))

    @staticmethod
    def _h_x_given_uz(pux, xz):
        p_uxz = pux[..., :, :, None] * xz[:, None, :]
        p_uz = p_uxz.sum(axis=-3)
        return entropy_bits(p_uxz, axis=(-3, -2, -1)) - entropy_bits(p_uz, axis=(-2, -1))

    def quantities(self, pux, epsilon=0.0):
        """
        Region quantities of a batch of channels.

        Parameters
        ----------
        pux: numpy.ndarray
            ``(..., |X|, |U|)`` row-stochastic matrices.
        epsilon: float
            Type-I error level.

        Returns
        -------
        dict
            Arrays ``rate_needed``, ``exponent``, ``h_p_x_given_uz``, ``h_q_x_given_uz``,
            ``delta0_cap``, ``delta1_cap`` of the batch shape.
        """
        pux = np.asarray(pux, dtype=float)
        p_xu = self.px[:, None] * pux
        p_u = p_xu.sum(axis=-2)
        h_u = entropy_bits(p_u, axis=-1)
        p_uy = np.einsum("...xu,xy->...uy", pux, self.p_xy)

        rate = h_u + self.h_x - entropy_bits(p_xu, axis=(-2, -1))
        exponent = h_u + self.h_y - entropy_bits(p_uy, axis=(-2, -1))
        h_p = self._h_x_given_uz(pux, self.p_xz)
        h_q = self._h_x_given_uz(pux, self.q_xz)
        return {
            "rate_needed": rate,
            "exponent": exponent,
            "h_p_x_given_uz": h_p,
            "h_q_x_given_uz": h_q,
            "delta0_cap": (1 - epsilon) * h_p + epsilon * self.h_p_x_given_z,
            "delta1_cap": (1 - epsilon) * h_q + epsilon * self.h_q_x_given_z,
        }
