"""
Monte Carlo estimation of the scheme's error probabilities, and the per-blocklength report
that chooses between the exact and Monte Carlo paths.
"""
from dataclasses import asdict, dataclass
from typing import Tuple

import numpy as np
from scipy.stats import binomtest

from pyHTSecrecy.probcore import Hypothesis, joint_type, typical_mask
from pyHTSecrecy.scheme.analysis import (
    exact_equivocation,
    exact_error_probs,
    soft_covering_tv,
    state_limit,
)
from pyHTSecrecy.scheme.coding import (
    Codebook,
    SchemeParams,
    log_likelihoods,
    posterior_rows,
)
from pyHTSecrecy.utility.exceptions import SizeGuardError
from pyHTSecrecy.utility.process_functions import map_parallel
from pyHTSecrecy.utility.utils import derive_rng, devLogger, htparams, mylog


@dataclass(frozen=True)
class McEstimates:
    """
    Monte Carlo error estimates with Wilson confidence intervals.

    When no H1 trial is accepted, ``beta_exponent`` is the lower bound
    :math:`\\frac{1}{n}\\log_2(\\text{trials})` and ``beta_exponent_is_bound`` is set.
    """

    alpha_hat: float
    beta_hat: float
    alpha_interval: Tuple[float, float]
    beta_interval: Tuple[float, float]
    trials: int
    beta_exponent: float
    beta_exponent_is_bound: bool
    degenerate_posteriors: int

    @property
    def alpha_half_width(self):
        return 0.5 * (self.alpha_interval[1] - self.alpha_interval[0])

    @property
    def beta_half_width(self):
        return 0.5 * (self.beta_interval[1] - self.beta_interval[0])


@dataclass(frozen=True)
class SimReport:
    """
    Finite-blocklength measurements of one scheme instance.

    ``exact`` says whether the error probabilities were enumerated; the equivocations and
    the TV distance are ``nan`` whenever their own enumeration guard fails.
    """

    n: int
    alpha_hat: float
    alpha_ci: float
    beta_hat: float
    beta_ci: float
    beta_exponent: float
    equiv_h0: float
    equiv_h1: float
    tv_ideal: float
    trials: int
    exact: bool
    seed: int

    def to_dict(self):
        return asdict(self)


def _inverse_cdf(cdf, u):
    """Symbols with cumulative laws ``cdf`` (``(..., k)``) at uniforms ``u`` (``(...)``)."""
    idx = (u[..., None] >= cdf).sum(axis=-1)
    return np.minimum(idx, cdf.shape[-1] - 1)


def _draw_trials(params: SchemeParams, hypothesis: Hypothesis, seed, indices):
    """
    Source and observation sequences, switch bits and encoder uniforms for a batch of trials.

    Trial ``i`` uses the stream ``derive_rng(seed, hypothesis, i)`` and consumes, in order,
    ``n`` uniforms for :math:`x^n`, ``n`` for :math:`y^n`, one for the switch and one for
    the likelihood draw.
    """
    model, n = params.model, params.n
    px_cdf = np.cumsum(model.px.probs)
    pyx_cdf = np.cumsum(model.pyx.matrix, axis=1)
    py_cdf = np.cumsum(model.py.probs)

    count = len(indices)
    xs = np.empty((count, n), dtype=np.int64)
    ys = np.empty((count, n), dtype=np.int64)
    xi = np.empty(count, dtype=bool)
    r = np.empty(count)
    for k, i in enumerate(indices):
        rng = derive_rng(seed, hypothesis.value, i)
        xs[k] = _inverse_cdf(px_cdf, rng.random(n))
        u = rng.random(n)
        if hypothesis is Hypothesis.H0:
            ys[k] = _inverse_cdf(pyx_cdf[xs[k]], u)
        else:
            ys[k] = _inverse_cdf(py_cdf, u)
        xi[k] = rng.random() < 1 - params.epsilon
        r[k] = rng.random()
    return xs, ys, xi, r


def _run_batch(params: SchemeParams, cb: Codebook, hypothesis, seed, indices):
    """Number of trials decided H0 and of degenerate posteriors in one batch."""
    xs, ys, xi, r = _draw_trials(params, hypothesis, seed, indices)
    if not xi.any():
        return 0, 0
    xs, ys, r = xs[xi], ys[xi], r[xi]

    post, degenerate = posterior_rows(log_likelihoods(cb, params.pxu, xs))
    cdf = np.cumsum(post, axis=1)
    pick = np.minimum((cdf < (r * cdf[:, -1])[:, None]).sum(axis=1), cb.msg_count - 1)
    words = cb.words[pick]

    u_size = cb.pu.size
    encoded = typical_mask(
        joint_type([words, xs], (u_size, params.model.x_size)), params.p_ux.mass, params.mu
    )
    accepted = typical_mask(
        joint_type([words, ys], (u_size, params.model.y_size)),
        params.p_uy.mass,
        2 * params.mu,
    )
    return int(np.sum(encoded & accepted)), int(degenerate.sum())


def _wilson(successes, trials, level):
    ci = binomtest(successes, trials).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def mc_error_estimates(params: SchemeParams, cb: Codebook, trials, seed, confidence=None):
    """
    Monte Carlo estimates of :math:`\\alpha_n` and :math:`\\beta_n`.

    Under H0 :math:`(x^n, y^n)` is drawn from :math:`P_{XY}^{\\otimes n}`, under H1 from
    :math:`P_X^{\\otimes n} P_Y^{\\otimes n}`; each trial runs the switch, the encoder and the
    decoder. Trials are processed in batches on the worker pool; the estimates depend only
    on ``seed`` and ``trials``.

    Parameters
    ----------
    params: SchemeParams
        Scheme parameters.
    cb: Codebook
        The codebook.
    trials: int
        Trials per hypothesis, ``>= 1``.
    seed: int
        Root seed.
    confidence: float, optional
        Wilson interval level; ``defaults.simulation.confidence`` when omitted.

    Returns
    -------
    McEstimates
    """
    if trials < 1:
        raise ValueError(f"Need at least one trial, got {trials}.")
    sim_defaults = htparams["defaults"]["simulation"]
    level = float(confidence if confidence is not None else sim_defaults["confidence"])
    batch = max(1, int(float(sim_defaults["batch_elements"]) // cb.msg_count))
    batches = [np.arange(s, min(s + batch, trials)) for s in range(0, trials, batch)]

    # fill the cached properties before the workers share the objects
    _ = (params.pxu, params.p_ux, params.p_uy, cb.indicators)

    counts = {}
    degenerate = 0
    for hypothesis in Hypothesis:
        results = map_parallel(
            lambda idx, h=hypothesis: _run_batch(params, cb, h, seed, idx),
            batches,
            desc=f"Monte Carlo {hypothesis.name} (n={params.n})",
        )
        counts[hypothesis] = sum(res[0] for res in results)
        degenerate += sum(res[1] for res in results)

    rejected_h0 = trials - counts[Hypothesis.H0]
    accepted_h1 = counts[Hypothesis.H1]
    beta_hat = accepted_h1 / trials
    if accepted_h1 > 0:
        exponent, is_bound = float(-np.log2(beta_hat) / params.n), False
    else:
        exponent, is_bound = float(np.log2(trials) / params.n), True
        mylog.info(
            f"No H1 trial accepted at n={params.n}; reporting exponent >= {exponent:.4g}."
        )
    if degenerate:
        devLogger.debug(f"{degenerate} trials hit an all-zero likelihood row.")

    return McEstimates(
        alpha_hat=rejected_h0 / trials,
        beta_hat=beta_hat,
        alpha_interval=_wilson(rejected_h0, trials, level),
        beta_interval=_wilson(accepted_h1, trials, level),
        trials=int(trials),
        beta_exponent=exponent,
        beta_exponent_is_bound=is_bound,
        degenerate_posteriors=degenerate,
    )


def _beta_exponent(beta, n):
    return float(-np.log2(beta) / n) if beta > 0 else np.inf


def simulate_blocklength(
    params: SchemeParams, cb: Codebook, trials, seed, limit=None, method="direct"
):
    """
    Measure one scheme instance at its blocklength.

    Error probabilities are enumerated exactly when :math:`|X|^n|Y|^nM` passes the state
    guard and estimated by Monte Carlo (``trials`` per hypothesis) otherwise. The
    equivocations and the soft-covering distance are only computed exactly.

    Returns
    -------
    SimReport
    """
    n = params.n
    limit = state_limit(limit)
    try:
        errors = exact_error_probs(params, cb, limit=limit)
        exact = True
        alpha, beta = errors.alpha, errors.beta
        alpha_ci = beta_ci = 0.0
        exponent = _beta_exponent(beta, n)
        used_trials = 0
        mylog.info(f"n={n}: exact error enumeration.")
    except SizeGuardError:
        exact = False
        if trials < 1:
            alpha = beta = alpha_ci = beta_ci = exponent = np.nan
            used_trials = 0
        else:
            mylog.info(f"n={n}: Monte Carlo with {trials} trials per hypothesis.")
            est = mc_error_estimates(params, cb, trials, seed)
            alpha, beta = est.alpha_hat, est.beta_hat
            alpha_ci, beta_ci = est.alpha_half_width, est.beta_half_width
            exponent = est.beta_exponent
            used_trials = est.trials

    equiv = {}
    for hypothesis in Hypothesis:
        try:
            equiv[hypothesis] = exact_equivocation(
                params, cb, hypothesis, method=method, limit=limit
            )
        except SizeGuardError:
            equiv[hypothesis] = np.nan
    try:
        tv = soft_covering_tv(params, cb, limit=limit)
    except SizeGuardError:
        tv = np.nan

    return SimReport(
        n=n,
        alpha_hat=alpha,
        alpha_ci=alpha_ci,
        beta_hat=beta,
        beta_ci=beta_ci,
        beta_exponent=exponent,
        equiv_h0=equiv[Hypothesis.H0],
        equiv_h1=equiv[Hypothesis.H1],
        tv_ideal=tv,
        trials=used_trials,
        exact=exact,
        seed=int(seed),
    )
