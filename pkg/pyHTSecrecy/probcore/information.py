"""
Information measures in bits.

Entropies use the :math:`0 \\log 0 = 0` convention through :py:func:`scipy.special.entr`;
conditional entropy and mutual information are computed as differences of joint entropies,
so no division by zero can occur on those paths.
"""
import numpy as np
from scipy.special import entr, rel_entr

from pyHTSecrecy.probcore.distributions import JointPmf, Pmf
from pyHTSecrecy.utility.exceptions import DimensionError

_LN2 = np.log(2.0)


def entropy_bits(mass, axis=None):
    """
    Shannon entropy in bits of a (possibly batched) mass array.

    Parameters
    ----------
    mass: array-like
        Non-negative masses. Nothing is normalized.
    axis: int or tuple of int, optional
        Axes summed over; ``None`` sums over everything.
    """
    return entr(np.asarray(mass, dtype=float)).sum(axis=axis) / _LN2


def entropy(p):
    """
    Entropy :math:`H(p) = -\\sum p \\log_2 p` of a :py:class:`Pmf` (or joint).

    Returns
    -------
    float
        A value in :math:`[0, \\log_2 |\\mathcal{A}|]`.
    """
    mass = p.probs if isinstance(p, Pmf) else p.mass
    return float(max(entropy_bits(mass), 0.0))


def _names(axes):
    return [axes] if isinstance(axes, str) else list(axes)


def _joint_entropy(j: JointPmf, names):
    if not names:
        return 0.0
    return entropy(j.marginal(names))


def conditional_entropy(j, target_axes, given_axes=()):
    """
    :math:`H(\\text{target}|\\text{given}) = H(\\text{target},\\text{given}) - H(\\text{given})`.

    Parameters
    ----------
    j: JointPmf
        The joint law.
    target_axes, given_axes: str or sequence of str
        Disjoint axis names of ``j``. An empty ``given_axes`` yields :math:`H(\\text{target})`.
    """
    target, given = _names(target_axes), _names(given_axes)
    if set(target) & set(given):
        raise DimensionError(f"Axes {target} and {given} overlap.")
    value = _joint_entropy(j, target + given) - _joint_entropy(j, given)
    return float(max(value, 0.0))


def mutual_information(j, axes_a, axes_b):
    """
    :math:`I(A;B) = H(A) + H(B) - H(A,B)`, clipped at zero against round-off.
    """
    a, b = _names(axes_a), _names(axes_b)
    if set(a) & set(b):
        raise DimensionError(f"Axes {a} and {b} overlap.")
    value = _joint_entropy(j, a) + _joint_entropy(j, b) - _joint_entropy(j, a + b)
    return float(max(value, 0.0))


def kl_divergence(p, q):
    """
    Relative entropy :math:`D(p\\|q)` in bits; ``inf`` when ``p`` is not absolutely
    continuous with respect to ``q``.
    """
    p_mass = p.probs if isinstance(p, Pmf) else p.mass
    q_mass = q.probs if isinstance(q, Pmf) else q.mass
    if p_mass.shape != q_mass.shape:
        raise DimensionError(f"Shapes {p_mass.shape} and {q_mass.shape} differ.")
    return float(rel_entr(p_mass, q_mass).sum() / _LN2)
