"""
Exact finite-blocklength analysis of a fixed codebook by full enumeration.

Every routine here enumerates all source (and observation) sequences, so each is guarded
by ``defaults.simulation.exact_state_limit``. Sequences are enumerated in lexicographic
order, which matches the index order of Kronecker powers of the per-letter laws.
"""
import functools
import itertools
from dataclasses import dataclass

import numpy as np

from pyHTSecrecy.probcore import Hypothesis, entropy_bits, pairwise_typical
from pyHTSecrecy.scheme.coding import (
    Codebook,
    SchemeParams,
    encoder_law,
    log_likelihoods,
    posterior_rows,
)
from pyHTSecrecy.utility.exceptions import NumericalError, SizeGuardError
from pyHTSecrecy.utility.utils import devLogger, htparams

EQUIVOCATION_METHODS = ("direct", "chain")


@dataclass(frozen=True)
class ErrorProbabilities:
    """Exact type-I and type-II error probabilities of one codebook."""

    alpha: float
    beta: float


def state_limit(limit=None):
    """The enumeration guard, ``defaults.simulation.exact_state_limit`` unless overridden."""
    if limit is None:
        limit = htparams["defaults"]["simulation"]["exact_state_limit"]
    return float(limit)


def _guard(what, size, limit):
    if size > state_limit(limit):
        raise SizeGuardError(what, float(size), state_limit(limit))


def all_sequences(k, n):
    """Every length-``n`` sequence over ``k`` symbols, lexicographic, ``(k**n, n)``."""
    return np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int64).reshape(
        -1, n
    )


def kron_power(a, n):
    """``a`` Kronecker-multiplied with itself ``n`` times (vector or matrix)."""
    return functools.reduce(np.kron, [np.asarray(a, dtype=float)] * n)


def exact_error_probs(params: SchemeParams, cb: Codebook, limit=None):
    """
    Exact :math:`(\\alpha_n, \\beta_n)` of the scheme with codebook ``cb``.

    :math:`\\alpha_n` is the probability of declaring H1 under H0 and :math:`\\beta_n` the
    probability of declaring H0 under H1; both are averages over the source, the encoder's
    randomness and Bob's observation.

    Raises
    ------
    SizeGuardError
        When :math:`|X|^n |Y|^n M` exceeds the enumeration guard.
    """
    model, n = params.model, params.n
    _guard(
        "exact error enumeration |X|^n |Y|^n M",
        float(model.x_size) ** n * float(model.y_size) ** n * cb.msg_count,
        limit,
    )
    xs = all_sequences(model.x_size, n)
    ys = all_sequences(model.y_size, n)
    px_n = kron_power(model.px.probs, n)
    pyx_n = kron_power(model.pyx.matrix, n)
    py_n = kron_power(model.py.probs, n)

    law = encoder_law(params, cb, xs)
    accept = pairwise_typical(cb.words, ys, params.p_uy, 2 * params.mu).astype(float)
    sent = px_n[:, None] * law[:, 1:]

    alpha = 1.0 - float(np.sum(sent * (pyx_n @ accept.T)))
    beta = float(np.sum(sent * (py_n @ accept.T)[None, :]))
    if not (np.isfinite(alpha) and np.isfinite(beta)):
        raise NumericalError("Non-finite error probability in the exact enumeration.")
    return ErrorProbabilities(float(np.clip(alpha, 0.0, 1.0)), float(np.clip(beta, 0.0, 1.0)))


def exact_equivocation(
    params: SchemeParams,
    cb: Codebook,
    hypothesis: Hypothesis,
    method="direct",
    limit=None,
    chunk_elements=4_000_000,
):
    """
    Normalized equivocation :math:`\\frac{1}{n} H(X^n | Z^n, M)` under ``hypothesis``.

    Parameters
    ----------
    params: SchemeParams
        Scheme parameters (FULL model).
    cb: Codebook
        The codebook.
    hypothesis: Hypothesis
        Selects :math:`P_{Z|X}` (H0) or :math:`Q_{Z|X}` (H1).
    method: str
        ``"direct"`` computes :math:`H(X^nZ^nM) - H(Z^nM)` from the full joint; ``"chain"``
        uses :math:`H(X^nZ^n) + H(M|X^n) - H(Z^nM)`, which relies on the Markov chain
        :math:`M - X^n - Z^n`. Both agree to round-off.
    limit: float, optional
        Override of the enumeration guard.
    chunk_elements: int
        Bound on the working joint slab of the direct method.

    Returns
    -------
    float
        Bits per symbol, in ``[0, log2 |X|]``.
    """
    if method not in EQUIVOCATION_METHODS:
        raise ValueError(f"Unknown equivocation method {method!r}; use {EQUIVOCATION_METHODS}.")
    hypothesis = Hypothesis(hypothesis)
    model, n = params.model, params.n
    _guard(
        "exact equivocation enumeration |X|^n |Z|^n M",
        float(model.x_size) ** n * float(model.z_size) ** n * cb.msg_count,
        limit,
    )
    xs = all_sequences(model.x_size, n)
    px_n = kron_power(model.px.probs, n)
    pxz_n = px_n[:, None] * kron_power(model.z_given_x(hypothesis).matrix, n)

    law = encoder_law(params, cb, xs)
    h_zm = entropy_bits(pxz_n.T @ law)

    if method == "direct":
        z_count, m_count = pxz_n.shape[1], law.shape[1]
        rows = max(1, int(chunk_elements) // (z_count * m_count))
        h_xzm = 0.0
        for start in range(0, xs.shape[0], rows):
            slab = pxz_n[start : start + rows, :, None] * law[start : start + rows, None, :]
            h_xzm += float(entropy_bits(slab))
    else:
        h_xzm = float(entropy_bits(pxz_n)) + float(
            np.sum(px_n * entropy_bits(law, axis=1))
        )

    value = (h_xzm - float(h_zm)) / n
    if not np.isfinite(value):
        raise NumericalError("Non-finite equivocation.")
    devLogger.debug(f"Equivocation ({hypothesis.name}, {method}) at n={n}: {value:.9g}.")
    return float(np.clip(value, 0.0, np.log2(model.x_size)))


def soft_covering_tv(params: SchemeParams, cb: Codebook, limit=None):
    """
    Total-variation distance between the likelihood encoder's joint law of
    :math:`(X^n, M)` and the ideal one (message uniform, :math:`X^n` drawn through
    :math:`P_{X|U}^{\\otimes n}` from its codeword).

    The encoder's typicality check and switch are not applied; only the likelihood
    posterior is compared.
    """
    model, n = params.model, params.n
    _guard("soft-covering enumeration |X|^n M", float(model.x_size) ** n * cb.msg_count, limit)
    xs = all_sequences(model.x_size, n)
    px_n = kron_power(model.px.probs, n)

    ll = log_likelihoods(cb, params.pxu, xs)
    post, _ = posterior_rows(ll)
    real = px_n[:, None] * post
    ideal = np.exp(ll) / cb.msg_count
    return float(0.5 * np.abs(real - ideal).sum())
