"""
The finite-blocklength coding scheme: random codebook, likelihood encoder with a
Bernoulli(:math:`1-\\epsilon`) switch, and the typicality decoder.

Messages are numbered ``1 .. msg_count``; message ``0`` is the dummy message sent by the
degenerate branch (and when the encoder's typicality check fails), on which the decoder
always declares H1.
"""
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from pyHTSecrecy.probcore import (
    CondPmf,
    Hypothesis,
    Pmf,
    SourceModel,
    is_typical,
    pairwise_typical,
)
from pyHTSecrecy.region.evaluation import AuxChannel, build_joint_h0
from pyHTSecrecy.utility.exceptions import (
    DimensionError,
    ModelModeError,
    OperatingConditionError,
    SizeGuardError,
)
from pyHTSecrecy.utility.utils import devLogger, htparams


def message_count(n, rate):
    """
    :math:`\\lceil 2^{nR} \\rceil`, exact when :math:`nR` is an integer up to round-off.
    """
    exponent = n * rate
    nearest = round(exponent)
    if abs(exponent - nearest) <= 1e-9:
        return 2 ** int(nearest)
    return int(math.ceil(2.0**exponent))


@dataclass(frozen=True)
class Codebook:
    """
    A random codebook: ``msg_count`` words of length ``n`` over the :math:`U` alphabet.

    Row ``m - 1`` of ``words`` is the codeword of message ``m``.
    """

    n: int
    rate: float
    msg_count: int
    words: np.ndarray
    pu: Pmf
    seed: int

    def __post_init__(self):
        words = np.array(self.words, dtype=np.int64)
        if words.shape != (self.msg_count, self.n):
            raise DimensionError(
                f"Codebook words have shape {words.shape}, expected {(self.msg_count, self.n)}."
            )
        if words.min() < 0 or words.max() >= self.pu.size:
            raise DimensionError("Codebook symbols outside the U alphabet.")
        words.setflags(write=False)
        object.__setattr__(self, "words", words)

    @cached_property
    def indicators(self):
        """``(|U|, msg_count, n)`` 0/1 float array, ``[a, m, t] = 1{u_t(m+1) = a}``."""
        return np.stack([(self.words == a).astype(float) for a in range(self.pu.size)])

    def word(self, m):
        """Codeword of message ``m`` (1-based)."""
        if not 1 <= m <= self.msg_count:
            raise DimensionError(f"Message {m} is not in 1..{self.msg_count}.")
        return self.words[m - 1]


def generate_codebook(pu: Pmf, n: int, rate: float, seed: int):
    """
    Draw :math:`\\lceil 2^{nR}\\rceil` codewords with i.i.d. :math:`P_U` entries.

    Parameters
    ----------
    pu: Pmf
        Symbol law.
    n: int
        Blocklength.
    rate: float
        Rate in bits per symbol; ``n * rate`` may not exceed
        ``defaults.simulation.max_codebook_bits``.
    seed: int
        RNG seed; the codebook is a deterministic function of it.
    """
    if n < 1:
        raise ValueError(f"Blocklength must be >= 1, got {n}.")
    if not rate > 0:
        raise ValueError(f"Codebook rate must be positive, got {rate}.")
    limit = htparams["defaults"]["simulation"]["max_codebook_bits"]
    if n * rate > limit:
        raise SizeGuardError("codebook size n*R in bits", n * rate, limit)

    msg_count = message_count(n, rate)
    rng = np.random.default_rng(int(seed))
    words = rng.choice(pu.size, size=(msg_count, n), p=pu.probs)
    devLogger.debug(f"Codebook n={n}, R={rate}, {msg_count} words, seed={seed}.")
    return Codebook(n, float(rate), msg_count, words, pu, int(seed))


@dataclass(frozen=True)
class SchemeParams:
    """
    Parameters of one scheme instance.

    Parameters
    ----------
    model: SourceModel
        FULL-mode source model.
    aux: AuxChannel
        The auxiliary channel :math:`P_{U|X}`.
    rate: float
        Rate :math:`R`; must exceed :math:`I_P(U;X)` unless ``strict`` is off.
    epsilon: float
        Probability of the degenerate branch, in ``[0, 1]``.
    n: int
        Blocklength.
    mu: float, optional
        Encoder typicality radius (the decoder uses ``2 * mu``); defaults to
        :math:`n^{-1/3}`.
    strict: bool
        Enforce the operating condition :math:`R > I_P(U;X)`.
    """

    model: SourceModel
    aux: AuxChannel
    rate: float
    epsilon: float
    n: int
    mu: Optional[float] = None
    strict: bool = True

    def __post_init__(self):
        if not self.model.is_full:
            raise ModelModeError("The coding scheme")
        if self.aux.x_size != self.model.x_size:
            raise DimensionError(
                f"Auxiliary channel has {self.aux.x_size} rows, |X| = {self.model.x_size}."
            )
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}.")
        if self.n < 1:
            raise ValueError(f"Blocklength must be >= 1, got {self.n}.")
        if self.mu is None:
            object.__setattr__(self, "mu", self.n ** (-1.0 / 3.0))
        if not self.mu > 0:
            raise OperatingConditionError(f"Typicality radius must be positive, got {self.mu}.")
        if self.strict and not self.rate > self.rate_needed:
            raise OperatingConditionError.rate_below_bound(self.rate, self.rate_needed)

    @cached_property
    def joint_h0(self):
        """:math:`P_{UXYZ}`."""
        return build_joint_h0(self.model, self.aux)

    @cached_property
    def p_ux(self):
        """Encoder typicality reference :math:`P_{UX}` (axes ``U, X``)."""
        return self.joint_h0.marginal(["U", "X"])

    @cached_property
    def p_uy(self):
        """Decoder typicality reference :math:`P_{UY}` (axes ``U, Y``)."""
        return self.joint_h0.marginal(["U", "Y"])

    @cached_property
    def pu(self):
        return Pmf(self.p_ux.mass.sum(axis=1))

    @cached_property
    def pxu(self):
        """
        :math:`P_{X|U}` by Bayes' rule; rows of zero-probability :math:`u` are :math:`P_X`.
        """
        mass = self.p_ux.mass
        p_u = mass.sum(axis=1, keepdims=True)
        safe = np.where(p_u > 0, p_u, 1.0)
        rows = np.where(p_u > 0, mass / safe, self.model.px.probs[None, :])
        return CondPmf(rows)

    @cached_property
    def rate_needed(self):
        """:math:`I_P(U;X)`."""
        mass = self.p_ux.mass
        p_u, p_x = mass.sum(axis=1), mass.sum(axis=0)
        outer = np.outer(p_u, p_x)
        positive = mass > 0
        return float(np.sum(mass[positive] * np.log2(mass[positive] / outer[positive])))


# ---------------------------------------------------------------------------------------#
# Likelihood encoder                                                                     #
# ---------------------------------------------------------------------------------------#
def log_likelihoods(cb: Codebook, pxu: CondPmf, xseqs):
    """
    Natural-log likelihoods :math:`\\ln P_{X|U}^{\\otimes n}(x^n|u^n(m))` for a batch of
    source sequences against every codeword.

    Returns
    -------
    numpy.ndarray
        ``(S, msg_count)``; ``-inf`` where a codeword gives zero likelihood.
    """
    xseqs = np.atleast_2d(np.asarray(xseqs, dtype=np.int64))
    if xseqs.shape[1] != cb.n:
        raise DimensionError(f"Source sequences of length {xseqs.shape[1]}, n = {cb.n}.")
    if pxu.n_in != cb.pu.size:
        raise DimensionError(f"P_X|U has {pxu.n_in} rows, |U| = {cb.pu.size}.")
    if xseqs.min() < 0 or xseqs.max() >= pxu.n_out:
        raise DimensionError("Source symbols outside the X alphabet.")

    positive = pxu.matrix > 0
    logs = np.log(np.where(positive, pxu.matrix, 1.0))
    ll = np.zeros((xseqs.shape[0], cb.msg_count))
    zero_hits = np.zeros_like(ll)
    for a in range(cb.pu.size):
        ind = cb.indicators[a]
        ll += logs[a][xseqs] @ ind.T
        zero_hits += (~positive[a])[xseqs].astype(float) @ ind.T
    ll[zero_hits > 0] = -np.inf
    return ll


def posterior_rows(ll):
    """
    Normalize log-likelihood rows into posteriors.

    Returns
    -------
    posterior: numpy.ndarray
        Row-stochastic matrix; rows where every likelihood is zero are uniform.
    degenerate: numpy.ndarray
        Boolean flags of those rows.
    """
    degenerate = np.all(np.isneginf(ll), axis=1)
    safe = np.where(degenerate[:, None], 0.0, ll)
    return np.exp(safe - logsumexp(safe, axis=1, keepdims=True)), degenerate


def likelihood_posterior(cb: Codebook, pxu: CondPmf, xseq):
    """
    Likelihood-encoder law :math:`P^{LE}(m|x^n) \\propto P_{X|U}^{\\otimes n}(x^n|u^n(m))`.

    Returns
    -------
    posterior: Pmf
        Law over messages ``1 .. msg_count`` (entry ``m - 1`` belongs to message ``m``).
    degenerate: bool
        ``True`` when every codeword has zero likelihood; the posterior is then uniform.
    """
    post, degenerate = posterior_rows(log_likelihoods(cb, pxu, xseq))
    if degenerate[0]:
        devLogger.debug("All codewords have zero likelihood; using a uniform posterior.")
    return Pmf(post[0]), bool(degenerate[0])


def encoder_law(params: SchemeParams, cb: Codebook, xseqs):
    """
    Full encoder law :math:`P(m|x^n)`, :math:`m \\in \\{0, \\ldots, \\text{msg\\_count}\\}`.

    The law mixes the dummy message (probability :math:`\\epsilon`) with the likelihood
    encoder, whose draws are mapped to ``0`` when the pair :math:`(u^n(m), x^n)` is not
    :math:`\\mu`-typical for :math:`P_{UX}`.

    Returns
    -------
    numpy.ndarray
        ``(S, msg_count + 1)`` row-stochastic matrix.
    """
    xseqs = np.atleast_2d(np.asarray(xseqs, dtype=np.int64))
    post, _ = posterior_rows(log_likelihoods(cb, params.pxu, xseqs))
    typical = pairwise_typical(cb.words, xseqs, params.p_ux, params.mu).T
    kept = post * typical
    law = np.empty((xseqs.shape[0], cb.msg_count + 1))
    law[:, 1:] = (1 - params.epsilon) * kept
    law[:, 0] = params.epsilon + (1 - params.epsilon) * (post.sum(axis=1) - kept.sum(axis=1))
    return law


def encode(params: SchemeParams, cb: Codebook, xseq, xi=None, rng=None):
    """
    Alice's encoder.

    Parameters
    ----------
    params: SchemeParams
        Scheme parameters.
    cb: Codebook
        The codebook.
    xseq: array-like
        Source sequence of length ``n``.
    xi: int, optional
        Switch value; drawn as Bernoulli(:math:`1-\\epsilon`) from ``rng`` when omitted.
    rng: numpy.random.Generator, optional
        Randomness for the switch and the likelihood draw.

    Returns
    -------
    int
        Message in ``0 .. msg_count``.
    """
    rng = rng if rng is not None else np.random.default_rng()
    if xi is None:
        xi = int(rng.random() < 1 - params.epsilon)
    if xi == 0:
        return 0
    post, _ = likelihood_posterior(cb, params.pxu, xseq)
    m = int(rng.choice(cb.msg_count, p=post.probs)) + 1
    if is_typical((cb.word(m), np.asarray(xseq)), params.p_ux, params.mu):
        return m
    return 0


def decode(params: SchemeParams, cb: Codebook, m, yseq):
    """
    Bob's decision: H0 iff ``m != 0`` and :math:`(u^n(m), y^n)` is :math:`2\\mu`-typical for
    :math:`P_{UY}`.
    """
    if not 0 <= m <= cb.msg_count:
        raise DimensionError(f"Message {m} is not in 0..{cb.msg_count}.")
    if m == 0:
        return Hypothesis.H1
    if is_typical((cb.word(m), np.asarray(yseq)), params.p_uy, 2 * params.mu):
        return Hypothesis.H0
    return Hypothesis.H1
