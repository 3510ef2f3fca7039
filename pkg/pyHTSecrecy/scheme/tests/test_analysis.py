"""
Tests of the exact enumerators: error probabilities, equivocation and soft covering.
"""
import numpy as np
import pytest

from pyHTSecrecy.probcore import Hypothesis
from pyHTSecrecy.region import AuxChannel, RegionEvaluator, evaluate_point
from pyHTSecrecy.scheme import (
    SchemeParams,
    all_sequences,
    exact_equivocation,
    exact_error_probs,
    generate_codebook,
    kron_power,
    soft_covering_tv,
)
from pyHTSecrecy.utility.exceptions import SizeGuardError

MARGIN = 0.25


def _rate(model, aux):
    return evaluate_point(model, aux, 0.0).rate_needed + MARGIN


def test_enumeration_order_matches_kronecker_powers():
    xs = all_sequences(3, 2)
    assert xs.shape == (9, 2)
    assert list(xs[5]) == [1, 2]
    p = np.array([0.5, 0.3, 0.2])
    assert kron_power(p, 2)[5] == pytest.approx(0.3 * 0.2)


@pytest.mark.critical
@pytest.mark.parametrize("n", [2, 4, 6])
def test_degenerate_scheme_is_exact(full_source, bsc_aux, n):
    rate = _rate(full_source, bsc_aux)
    params = SchemeParams(full_source, bsc_aux, rate, 1.0, n)
    cb = generate_codebook(params.pu, n, rate, seed=n)
    errors = exact_error_probs(params, cb)
    assert errors.alpha == 1.0 and errors.beta == 0.0

    ev = RegionEvaluator(full_source)
    assert exact_equivocation(params, cb, Hypothesis.H0) == pytest.approx(ev.h_p_x_given_z, abs=1e-9)
    assert exact_equivocation(params, cb, Hypothesis.H1) == pytest.approx(ev.h_q_x_given_z, abs=1e-9)


@pytest.mark.critical
def test_mixture_identities(full_source, bsc_aux):
    n = 6
    rate = _rate(full_source, bsc_aux)
    pure = SchemeParams(full_source, bsc_aux, rate, 0.0, n)
    mixed = SchemeParams(full_source, bsc_aux, rate, 0.2, n)
    cb = generate_codebook(pure.pu, n, rate, seed=11)

    a = exact_error_probs(pure, cb)
    b = exact_error_probs(mixed, cb)
    assert b.alpha == pytest.approx(0.2 + 0.8 * a.alpha, abs=1e-12)
    assert b.beta == pytest.approx(0.8 * a.beta, abs=1e-12)

    ev = RegionEvaluator(full_source)
    for hypothesis, cap in ((Hypothesis.H0, ev.h_p_x_given_z), (Hypothesis.H1, ev.h_q_x_given_z)):
        direct = exact_equivocation(mixed, cb, hypothesis, method="direct")
        chain = exact_equivocation(mixed, cb, hypothesis, method="chain")
        assert direct == pytest.approx(chain, abs=1e-9)
        assert direct <= cap + 1e-9


def test_equivocation_small_chunks_agree(full_source, bsc_aux):
    rate = _rate(full_source, bsc_aux)
    params = SchemeParams(full_source, bsc_aux, rate, 0.2, 4)
    cb = generate_codebook(params.pu, 4, rate, seed=2)
    whole = exact_equivocation(params, cb, Hypothesis.H0)
    chunked = exact_equivocation(params, cb, Hypothesis.H0, chunk_elements=10)
    assert whole == pytest.approx(chunked, abs=1e-12)
    with pytest.raises(ValueError):
        exact_equivocation(params, cb, Hypothesis.H0, method="bayes")


def test_size_guards(full_source, bsc_aux):
    rate = _rate(full_source, bsc_aux)
    params = SchemeParams(full_source, bsc_aux, rate, 0.2, 4)
    cb = generate_codebook(params.pu, 4, rate, seed=0)
    with pytest.raises(SizeGuardError):
        exact_error_probs(params, cb, limit=100)
    with pytest.raises(SizeGuardError):
        exact_equivocation(params, cb, Hypothesis.H1, limit=100)
    with pytest.raises(SizeGuardError):
        soft_covering_tv(params, cb, limit=10)


@pytest.mark.critical
def test_soft_covering_single_codeword(full_source):
    aux = AuxChannel.constant(2)
    params = SchemeParams(full_source, aux, 1e-12, 0.2, 4)
    cb = generate_codebook(params.pu, 4, 1e-12, seed=0)
    assert cb.msg_count == 1
    assert soft_covering_tv(params, cb) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.slow
def test_soft_covering_trend(full_source, bsc_aux):
    i_ux = evaluate_point(full_source, bsc_aux, 0.0).rate_needed

    def mean_tv(n, rate):
        params = SchemeParams(full_source, bsc_aux, rate, 0.2, n, strict=False)
        return np.mean(
            [soft_covering_tv(params, generate_codebook(params.pu, n, rate, s)) for s in range(20)]
        )

    high = i_ux + 0.25
    low = max(i_ux - 0.2, 0.05)
    assert mean_tv(8, high) < mean_tv(4, high)
    assert mean_tv(8, low) > mean_tv(8, high)


@pytest.mark.slow
def test_equivocation_approaches_region_cap(full_source, bsc_aux):
    rate = _rate(full_source, bsc_aux)
    cap = evaluate_point(full_source, bsc_aux, 0.2).delta0_cap

    def mean_gap(n):
        params = SchemeParams(full_source, bsc_aux, rate, 0.2, n)
        values = [
            exact_equivocation(params, generate_codebook(params.pu, n, rate, seed), Hypothesis.H0)
            for seed in range(5)
        ]
        return np.mean(values) - cap

    gaps = [mean_gap(n) for n in (4, 6, 8)]
    assert gaps[2] < gaps[1] < gaps[0]
    assert abs(gaps[2]) <= 0.15
