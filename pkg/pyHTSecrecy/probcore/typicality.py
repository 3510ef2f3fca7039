"""
Types (empirical pmfs) of sequences and strong typicality.

A tuple of aligned sequences is :math:`\\mu`-typical with respect to a joint pmf ``ref``
when every joint symbol's empirical frequency is within ``mu`` of ``ref`` and symbols with
zero reference probability never occur. ``mu`` is not divided by the alphabet size and the
boundary :math:`|\\pi(a) - \\text{ref}(a)| = \\mu` counts as typical.
"""
import numpy as np

from pyHTSecrecy.probcore.distributions import Alphabet, JointPmf, Pmf
from pyHTSecrecy.utility.exceptions import DimensionError, OperatingConditionError

#: Absolute slack on the closed deviation test, absorbing floating round-off in ``ref``.
TYPICALITY_SLACK = 1e-12


def _check_symbols(seq, size, what="sequence"):
    if seq.size and (seq.min() < 0 or seq.max() >= size):
        raise DimensionError(
            f"{what} has symbols outside the alphabet {{0, ..., {size - 1}}}."
        )


def _check_radius(mu):
    if not mu > 0:
        raise OperatingConditionError(f"Typicality radius must be positive, got {mu}.")


def type_counts(seq, size):
    """
    Symbol counts of ``seq`` over an alphabet of ``size`` symbols (exact integers).
    """
    seq = np.asarray(seq, dtype=np.int64).reshape(-1)
    if seq.size == 0:
        raise DimensionError("The type of an empty sequence is undefined.")
    _check_symbols(seq, size)
    return np.bincount(seq, minlength=size)


def empirical_pmf(seq, alphabet):
    """
    Type (empirical pmf) of a sequence.

    Parameters
    ----------
    seq: array-like of int
        Symbols in ``range(alphabet.size)``.
    alphabet: Alphabet or int
        The alphabet.

    Returns
    -------
    Pmf
        Entries are multiples of ``1/len(seq)``.
    """
    alphabet = Alphabet(alphabet) if isinstance(alphabet, int) else alphabet
    counts = type_counts(seq, alphabet.size)
    return Pmf(counts / counts.sum(), alphabet)


def joint_type(seqs, sizes):
    """
    Joint types of aligned sequences, batched over leading dimensions.

    Parameters
    ----------
    seqs: sequence of array-like
        Integer arrays of a common shape ``(..., n)``.
    sizes: sequence of int
        Alphabet size of each sequence.

    Returns
    -------
    numpy.ndarray
        Shape ``(..., prod(sizes))``; frequencies of the C-order flattened joint symbols.
    """
    arrays = [np.asarray(s, dtype=np.int64) for s in seqs]
    if len(arrays) != len(sizes):
        raise DimensionError(f"Got {len(arrays)} sequences for {len(sizes)} alphabets.")
    shape = arrays[0].shape
    if any(a.shape != shape for a in arrays):
        raise DimensionError(f"Sequence shapes differ: {[a.shape for a in arrays]}.")
    if len(shape) == 0 or shape[-1] == 0:
        raise DimensionError("Typicality needs sequences of length n >= 1.")
    for a, size in zip(arrays, sizes):
        _check_symbols(a, size)
    flat = np.ravel_multi_index(tuple(arrays), tuple(sizes))
    k = int(np.prod(sizes))
    counts = (flat[..., None] == np.arange(k)).sum(axis=-2)
    return counts / shape[-1]


def typical_mask(types, ref, mu):
    """
    Vectorized strong-typicality test of joint types against a flattened reference.

    Parameters
    ----------
    types: numpy.ndarray
        Shape ``(..., K)`` frequencies as returned by :py:func:`joint_type`.
    ref: numpy.ndarray
        Flattened reference pmf, shape ``(K,)``.
    mu: float
        Typicality radius.
    """
    ref = np.asarray(ref, dtype=float).reshape(-1)
    close = np.abs(types - ref) <= mu + TYPICALITY_SLACK
    in_support = ~((types > 0) & (ref == 0))
    return np.all(close & in_support, axis=-1)


def is_typical(seqs, ref, mu):
    """
    Strong typicality of a tuple of aligned sequences.

    Parameters
    ----------
    seqs: tuple of array-like
        One sequence per axis of ``ref``, in ``ref``'s axis order, all of length ``n >= 1``.
    ref: JointPmf
        Reference joint pmf.
    mu: float
        Radius, ``mu > 0``.

    Returns
    -------
    bool
    """
    _check_radius(mu)
    if isinstance(ref, JointPmf):
        mass = ref.mass
    else:
        mass = np.asarray(ref.probs if isinstance(ref, Pmf) else ref, dtype=float)
    if len(seqs) != mass.ndim:
        raise DimensionError(
            f"{len(seqs)} sequences given for a reference with {mass.ndim} axes."
        )
    lengths = {len(np.asarray(s).reshape(-1)) for s in seqs}
    if len(lengths) != 1:
        raise DimensionError(f"Sequences have different lengths {sorted(lengths)}.")
    types = joint_type([np.asarray(s).reshape(-1) for s in seqs], mass.shape)
    return bool(typical_mask(types, mass, mu))


def pairwise_typical(words, seqs, ref, mu, chunk_elements=4_000_000):
    """
    Typicality of every (word, sequence) pair between two families of sequences.

    Parameters
    ----------
    words: array-like
        ``(M, n)`` integer matrix (the first axis of ``ref``).
    seqs: array-like
        ``(S, n)`` integer matrix (the second axis of ``ref``).
    ref: numpy.ndarray or JointPmf
        Two-axis reference pmf.
    mu: float
        Typicality radius.
    chunk_elements: int
        Upper bound on the ``M x chunk`` working matrices.

    Returns
    -------
    numpy.ndarray
        Boolean ``(M, S)`` matrix, identical entry by entry to :py:func:`is_typical`.
    """
    _check_radius(mu)
    mass = ref.mass if isinstance(ref, JointPmf) else np.asarray(ref, dtype=float)
    if mass.ndim != 2:
        raise DimensionError("pairwise_typical needs a two-axis reference.")
    words = np.atleast_2d(np.asarray(words, dtype=np.int64))
    seqs = np.atleast_2d(np.asarray(seqs, dtype=np.int64))
    if words.shape[1] != seqs.shape[1] or words.shape[1] == 0:
        raise DimensionError(
            f"Word length {words.shape[1]} and sequence length {seqs.shape[1]} differ."
        )
    a_size, b_size = mass.shape
    _check_symbols(words, a_size, "words")
    _check_symbols(seqs, b_size, "sequences")
    n = words.shape[1]

    # counts of (a, b) pairs are inner products of indicator rows
    word_ind = [(words == a).astype(float) for a in range(a_size)]
    out = np.empty((words.shape[0], seqs.shape[0]), dtype=bool)
    chunk = max(1, int(chunk_elements) // max(words.shape[0], 1))
    for start in range(0, seqs.shape[0], chunk):
        block = seqs[start : start + chunk]
        seq_ind = [(block == b).astype(float) for b in range(b_size)]
        ok = np.ones((words.shape[0], block.shape[0]), dtype=bool)
        for a in range(a_size):
            for b in range(b_size):
                freq = (word_ind[a] @ seq_ind[b].T) / n
                if mass[a, b] == 0:
                    ok &= freq == 0
                else:
                    ok &= np.abs(freq - mass[a, b]) <= mu + TYPICALITY_SLACK
        out[:, start : start + block.shape[0]] = ok
    return out
