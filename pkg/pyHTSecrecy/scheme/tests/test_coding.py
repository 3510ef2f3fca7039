"""
Tests of the codebook, the likelihood encoder and the typicality decoder.
"""
import numpy as np
import pytest

from pyHTSecrecy.probcore import CondPmf, Hypothesis, Pmf, example_source
from pyHTSecrecy.region import AuxChannel
from pyHTSecrecy.scheme import (
    Codebook,
    SchemeParams,
    decode,
    encode,
    encoder_law,
    generate_codebook,
    likelihood_posterior,
    message_count,
)
from pyHTSecrecy.utility.exceptions import (
    DimensionError,
    ModelModeError,
    OperatingConditionError,
    SizeGuardError,
)


def _codebook(words, u_size=2, rate=1.0):
    words = np.atleast_2d(words)
    return Codebook(
        n=words.shape[1],
        rate=rate,
        msg_count=words.shape[0],
        words=words,
        pu=Pmf(np.full(u_size, 1.0 / u_size)),
        seed=0,
    )


@pytest.mark.critical
def test_message_count_is_a_ceiling():
    assert message_count(1, 1.0) == 2
    assert message_count(3, 1.0 / 3.0) == 2
    assert message_count(2, 0.6) == 3
    assert message_count(4, 1e-12) == 1


@pytest.mark.critical
def test_codebook_generation():
    cb = generate_codebook(Pmf([1.0, 0.0]), 5, 0.8, seed=3)
    assert cb.msg_count == 16
    assert np.all(cb.words == 0)
    assert generate_codebook(Pmf([0.5, 0.5]), 1, 1.0, seed=0).msg_count == 2

    a = generate_codebook(Pmf([0.7, 0.3]), 10, 1.0, seed=42)
    b = generate_codebook(Pmf([0.7, 0.3]), 10, 1.0, seed=42)
    assert np.array_equal(a.words, b.words)
    freq = np.mean(a.words == 0)
    sigma = np.sqrt(0.21 / a.words.size)
    assert abs(freq - 0.7) <= 4 * sigma


def test_codebook_guards():
    with pytest.raises(SizeGuardError):
        generate_codebook(Pmf([0.5, 0.5]), 30, 1.0, seed=0)
    with pytest.raises(ValueError):
        generate_codebook(Pmf([0.5, 0.5]), 4, 0.0, seed=0)
    with pytest.raises(DimensionError):
        _codebook([[0, 2]])


@pytest.mark.critical
def test_likelihood_posterior_values():
    bsc = CondPmf([[0.9, 0.1], [0.1, 0.9]])
    post, degenerate = likelihood_posterior(_codebook([[0, 1], [0, 1]]), bsc, [0, 0])
    assert post.probs == pytest.approx([0.5, 0.5]) and not degenerate

    post, _ = likelihood_posterior(_codebook([[0, 0], [1, 1]]), bsc, [0, 0])
    assert post.probs[0] == pytest.approx(0.81 / 0.82, abs=1e-12)

    post, _ = likelihood_posterior(_codebook([[0], [1]]), CondPmf([[1.0, 0.0], [0.5, 0.5]]), [1])
    assert post.probs == pytest.approx([0.0, 1.0])


def test_all_zero_likelihood_is_uniform_and_flagged():
    post, degenerate = likelihood_posterior(
        _codebook([[0], [1]]), CondPmf([[1.0, 0.0], [1.0, 0.0]]), [1]
    )
    assert degenerate
    assert post.probs == pytest.approx([0.5, 0.5])


def test_scheme_params_checks(full_source, bsc_aux):
    with pytest.raises(OperatingConditionError) as info:
        SchemeParams(full_source, bsc_aux, 0.3, 0.2, 4)
    assert info.value.rate == 0.3 and info.value.bound == pytest.approx(0.35775, abs=1e-4)
    with pytest.raises(ModelModeError):
        SchemeParams(example_source(), bsc_aux, 0.9, 0.2, 4)
    with pytest.raises(ValueError):
        SchemeParams(full_source, bsc_aux, 0.9, 1.5, 4)
    loose = SchemeParams(full_source, bsc_aux, 0.3, 0.2, 4, strict=False)
    assert loose.mu == pytest.approx(4 ** (-1 / 3))
    with pytest.raises(OperatingConditionError):
        SchemeParams(full_source, bsc_aux, 0.9, 0.2, 4, mu=0.0)
    assert loose.rate_needed == pytest.approx(0.35775, abs=1e-4)


def test_bayes_rows_of_unused_symbols_are_px(full_source, bsc_aux):
    params = SchemeParams(full_source, bsc_aux.padded(3), 0.9, 0.2, 4)
    assert params.pxu.matrix[2] == pytest.approx(full_source.px.probs)
    assert params.pxu.matrix[0] == pytest.approx([0.72 / 0.74, 0.02 / 0.74])


@pytest.mark.critical
def test_encoder(full_source):
    params = SchemeParams(full_source, AuxChannel.identity(2), 1.0, 0.0, 4)
    cb = _codebook([[0, 0, 0, 1]])
    rng = np.random.default_rng(0)
    assert encode(params, cb, [0, 0, 0, 1], xi=0, rng=rng) == 0
    assert encode(params, cb, [0, 0, 0, 1], xi=1, rng=rng) == 1
    # the only codeword is atypical with an all-ones source sequence
    assert encode(params, cb, [1, 1, 1, 1], xi=1, rng=rng) == 0


@pytest.mark.critical
def test_decoder(full_source):
    params = SchemeParams(full_source, AuxChannel.identity(2), 1.0, 0.2, 4, mu=10.0)
    cb = _codebook([[0, 0, 0, 0]])
    for y in ([0, 0, 0, 0], [2, 2, 2, 2], [1, 0, 0, 0]):
        assert decode(params, cb, 0, y) is Hypothesis.H1
    assert decode(params, cb, 1, [0, 0, 2, 0]) is Hypothesis.H0
    # Bob sees a 1 that the codeword's X could never produce
    assert decode(params, cb, 1, [1, 0, 0, 0]) is Hypothesis.H1
    with pytest.raises(DimensionError):
        decode(params, cb, 2, [0, 0, 0, 0])


@pytest.mark.critical
def test_encoder_law_is_stochastic_and_monotone_in_mu(full_source, bsc_aux):
    xs = np.array([[0, 0, 0, 0, 0, 1], [1, 1, 0, 1, 1, 1], [0, 1, 0, 1, 0, 1]])
    narrow = SchemeParams(full_source, bsc_aux, 0.7, 0.2, 6, mu=0.15)
    wide = SchemeParams(full_source, bsc_aux, 0.7, 0.2, 6, mu=0.4)
    cb = generate_codebook(narrow.pu, 6, 0.7, seed=5)
    for params in (narrow, wide):
        law = encoder_law(params, cb, xs)
        assert law.shape == (3, cb.msg_count + 1)
        assert law.sum(axis=1) == pytest.approx(np.ones(3), abs=1e-12)
        assert np.all(law[:, 0] >= 0.2 - 1e-15)
    sent_narrow = encoder_law(narrow, cb, xs)[:, 1:].sum(axis=1)
    sent_wide = encoder_law(wide, cb, xs)[:, 1:].sum(axis=1)
    assert np.all(sent_wide >= sent_narrow - 1e-15)
