"""
Finite-alphabet probability objects: alphabets, pmfs, conditional pmfs, dense joint pmfs
and the source model of the hypothesis test.

All objects are immutable after construction (their arrays are flagged read-only), so they
can be shared freely between threads.
"""
import string
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from pyHTSecrecy.utility.exceptions import DimensionError, ProbabilityError

#: Largest allowed distance of an input's total mass from 1 before it is rejected.
NORMALIZATION_TOLERANCE = 1e-9
#: Negative entries down to this value are treated as round-off and clipped to 0.
_NEGATIVE_ROUNDOFF = 1e-12


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def _normalized(array, what):
    array = np.array(array, dtype=float)
    if not np.all(np.isfinite(array)):
        raise ProbabilityError(f"{what} contains non-finite entries.")
    if np.any(array < -_NEGATIVE_ROUNDOFF):
        raise ProbabilityError(f"{what} has negative entries (min={array.min():.3g}).")
    array = np.clip(array, 0.0, None)
    total = array.sum(axis=-1, keepdims=True)
    if np.any(np.abs(total - 1.0) > NORMALIZATION_TOLERANCE):
        raise ProbabilityError(
            f"{what} must sum to 1 within {NORMALIZATION_TOLERANCE:g} (got {np.ravel(total)})."
        )
    return array / total


@dataclass(frozen=True)
class Alphabet:
    """
    A finite alphabet :math:`\\{0, \\ldots, \\text{size}-1\\}` with optional display labels.
    """

    size: int
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise DimensionError(f"Alphabet size must be a positive integer, got {self.size}.")
        object.__setattr__(self, "size", int(self.size))
        if self.labels is not None:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != self.size:
                raise DimensionError(
                    f"Alphabet of size {self.size} given {len(labels)} labels."
                )
            if len(set(labels)) != len(labels):
                raise DimensionError(f"Alphabet labels must be distinct: {labels}.")
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.size

    def label(self, symbol):
        """Display string of ``symbol``."""
        return str(symbol) if self.labels is None else self.labels[symbol]


def _alphabet(alphabet, size, what):
    if alphabet is None:
        return Alphabet(size)
    if isinstance(alphabet, int):
        alphabet = Alphabet(alphabet)
    if alphabet.size != size:
        raise DimensionError(f"{what} has {size} entries but its alphabet has {alphabet.size}.")
    return alphabet


class Pmf:
    """
    Probability mass function over an :py:class:`Alphabet`.

    Inputs whose total is within ``1e-9`` of one are normalized; anything further off is
    rejected with :py:class:`~utility.exceptions.ProbabilityError`.

    Parameters
    ----------
    probs: array-like
        Probabilities, one per symbol.
    alphabet: Alphabet or int, optional
        The support alphabet. Defaults to ``Alphabet(len(probs))``.
    """

    def __init__(self, probs, alphabet=None):
        probs = np.asarray(probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise DimensionError(f"A pmf must be a non-empty vector, got shape {probs.shape}.")
        #: Read-only probability vector.
        self.probs = _frozen(_normalized(probs, "Pmf"))
        #: The alphabet.
        self.alphabet = _alphabet(alphabet, probs.size, "Pmf")

    @property
    def size(self):
        return self.alphabet.size

    def __len__(self):
        return self.size

    def __getitem__(self, symbol):
        return self.probs[symbol]

    def __repr__(self):
        return f"Pmf({np.array2string(self.probs, precision=6)})"

    def __eq__(self, other):
        return isinstance(other, Pmf) and np.array_equal(self.probs, other.probs)

    __hash__ = None


class CondPmf:
    """
    Conditional pmf as a row-stochastic matrix; row ``i`` is the law of the output given
    conditioning symbol ``i``.

    Parameters
    ----------
    rows: array-like
        ``(n_in, n_out)`` matrix.
    in_alphabet, out_alphabet: Alphabet or int, optional
        Alphabets of the conditioning and output variables.
    """

    def __init__(self, rows, in_alphabet=None, out_alphabet=None):
        rows = np.asarray(rows, dtype=float)
        if rows.ndim != 2 or rows.size == 0:
            raise DimensionError(
                f"A conditional pmf must be a non-empty matrix, got shape {rows.shape}."
            )
        #: Read-only row-stochastic matrix.
        self.matrix = _frozen(_normalized(rows, "CondPmf row"))
        self.in_alphabet = _alphabet(in_alphabet, rows.shape[0], "CondPmf input")
        self.out_alphabet = _alphabet(out_alphabet, rows.shape[1], "CondPmf output")

    @property
    def n_in(self):
        return self.matrix.shape[0]

    @property
    def n_out(self):
        return self.matrix.shape[1]

    def row(self, symbol):
        """The output law given ``symbol`` as a :py:class:`Pmf`."""
        return Pmf(self.matrix[symbol], self.out_alphabet)

    def __repr__(self):
        return f"CondPmf({self.n_in}x{self.n_out})"

    def __eq__(self, other):
        return isinstance(other, CondPmf) and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


class JointPmf:
    """
    Dense joint pmf over named axes.

    Parameters
    ----------
    mass: array-like
        Tensor with one dimension per axis.
    names: sequence of str
        Distinct axis names (``"U"``, ``"X"``, ...).
    alphabets: sequence of Alphabet, optional
        Alphabets of the axes, defaulting to unlabelled alphabets of the tensor's sizes.
    """

    def __init__(self, mass, names, alphabets=None):
        mass = np.asarray(mass, dtype=float)
        names = tuple(str(name) for name in names)
        if mass.ndim != len(names) or mass.ndim == 0:
            raise DimensionError(
                f"Joint mass of shape {mass.shape} does not match axes {names}."
            )
        if len(set(names)) != len(names):
            raise DimensionError(f"Axis names must be distinct: {names}.")
        if alphabets is None:
            alphabets = [None] * len(names)
        if len(alphabets) != len(names):
            raise DimensionError(f"Got {len(alphabets)} alphabets for axes {names}.")
        flat = _normalized(mass.reshape(-1), "JointPmf")
        #: Read-only mass tensor.
        self.mass = _frozen(flat.reshape(mass.shape))
        #: Axis names in tensor order.
        self.names = names
        #: Axis alphabets in tensor order.
        self.alphabets = tuple(
            _alphabet(a, s, f"axis {n}") for a, s, n in zip(alphabets, mass.shape, names)
        )

    @classmethod
    def from_pmf(cls, pmf, name):
        """Single-axis joint holding ``pmf``."""
        return cls(pmf.probs, [name], [pmf.alphabet])

    @property
    def shape(self):
        return self.mass.shape

    def axis(self, name):
        """Tensor index of the axis called ``name``."""
        try:
            return self.names.index(name)
        except ValueError:
            raise DimensionError(f"No axis {name!r} in joint over {self.names}.") from None

    def _axes(self, names):
        names = [names] if isinstance(names, str) else list(names)
        return [self.axis(name) for name in names]

    def reorder(self, names):
        """The same joint with its axes permuted into ``names`` order."""
        idx = self._axes(names)
        if sorted(idx) != list(range(self.mass.ndim)):
            raise DimensionError(f"{names} is not a permutation of {self.names}.")
        return JointPmf(
            np.transpose(self.mass, idx),
            [self.names[i] for i in idx],
            [self.alphabets[i] for i in idx],
        )

    def marginal(self, names):
        """Marginal over ``names`` (kept in the order given)."""
        idx = self._axes(names)
        if len(set(idx)) != len(idx):
            raise DimensionError(f"Repeated axes in {names}.")
        dropped = tuple(i for i in range(self.mass.ndim) if i not in idx)
        kept = sorted(idx)
        mass = self.mass.sum(axis=dropped) if dropped else self.mass
        order = [kept.index(i) for i in idx]
        return JointPmf(
            np.transpose(mass, order),
            [self.names[i] for i in idx],
            [self.alphabets[i] for i in idx],
        )

    def conditional(self, target, given):
        """
        Conditional pmf of axis ``target`` given the axes ``given``.

        Rows are indexed by the C-order flattening of the ``given`` axes. Rows of
        conditioning tuples with zero mass are uniform so the result stays row-stochastic.
        """
        given = [given] if isinstance(given, str) else list(given)
        if target in given:
            raise DimensionError(f"Axis {target!r} cannot condition on itself.")
        joint = self.marginal(given + [target]).mass
        n_out = joint.shape[-1]
        rows = joint.reshape(-1, n_out)
        totals = rows.sum(axis=1, keepdims=True)
        safe = np.where(totals > 0, totals, 1.0)
        rows = np.where(totals > 0, rows / safe, 1.0 / n_out)
        return CondPmf(rows, out_alphabet=self.alphabets[self.axis(target)])

    def __repr__(self):
        return f"JointPmf(axes={self.names}, shape={self.shape})"


def compose(j, c, input_axes, name, alphabet=None):
    """
    Append a new axis drawn through a channel: :math:`j(\\cdot)\\, c(\\text{new}|\\text{inputs})`.

    Parameters
    ----------
    j: JointPmf
        The input joint.
    c: CondPmf
        Channel whose rows are indexed by the C-order flattening of ``input_axes``.
    input_axes: sequence of str
        Axes of ``j`` feeding the channel.
    name: str
        Name of the appended axis.
    alphabet: Alphabet, optional
        Alphabet of the new axis; defaults to the channel's output alphabet.

    Returns
    -------
    JointPmf
        Joint over ``j.names + (name,)``.
    """
    input_axes = [input_axes] if isinstance(input_axes, str) else list(input_axes)
    idx = j._axes(input_axes)
    in_shape = tuple(j.shape[i] for i in idx)
    if int(np.prod(in_shape)) != c.n_in:
        raise DimensionError(
            f"Channel with {c.n_in} input rows cannot be fed by axes {input_axes} of sizes {in_shape}."
        )
    if name in j.names:
        raise DimensionError(f"Axis {name!r} already exists in {j.names}.")

    letters = string.ascii_letters
    if j.mass.ndim + 1 > len(letters):
        raise DimensionError("Too many axes for compose.")
    j_sub = letters[: j.mass.ndim]
    new = letters[j.mass.ndim]
    c_sub = "".join(j_sub[i] for i in idx) + new
    mass = np.einsum(
        f"{j_sub},{c_sub}->{j_sub}{new}", j.mass, c.matrix.reshape(in_shape + (c.n_out,))
    )
    alphabet = c.out_alphabet if alphabet is None else alphabet
    return JointPmf(mass, j.names + (name,), j.alphabets + (alphabet,))


class EveMode(Enum):
    """How the eavesdropper's observation law is specified."""

    #: :math:`P_{Z|XY}` given; both hypotheses' :math:`Z|X` laws are derived from it.
    FULL = "FULL"
    #: Only :math:`P_{Z|X}` (under H0) and :math:`Q_{Z|X}` (under H1) given; region only.
    MARGINAL = "MARGINAL"


class Hypothesis(Enum):
    """The two hypotheses of the test against independence."""

    H0 = 0
    H1 = 1


@dataclass(frozen=True)
class SourceModel:
    """
    Discrete memoryless source model of the hypothesis test.

    Under H0 :math:`(X,Y,Z) \\sim P_X P_{Y|X} P_{Z|XY}`; under H1 :math:`X` and :math:`Y`
    are independent with the same marginals, :math:`Q_{XYZ} = P_X P_Y P_{Z|XY}`.

    In ``FULL`` mode ``pzxy`` (rows indexed by ``x * |Y| + y``) is given and ``pzx_h0`` /
    ``qzx_h1`` are derived from it; passing them explicitly is an error. In ``MARGINAL`` mode
    ``pzx_h0`` and ``qzx_h1`` are given and ``pzxy`` is absent.
    """

    px: Pmf
    pyx: CondPmf
    eve_mode: EveMode = EveMode.FULL
    pzxy: Optional[CondPmf] = None
    pzx_h0: Optional[CondPmf] = None
    qzx_h1: Optional[CondPmf] = None
    name: str = field(default="source", compare=False)

    def __post_init__(self):
        mode = EveMode(self.eve_mode)
        object.__setattr__(self, "eve_mode", mode)
        nx, ny = self.px.size, self.pyx.n_out
        if self.pyx.n_in != nx:
            raise DimensionError(f"P_Y|X has {self.pyx.n_in} rows, |X| = {nx}.")

        if mode is EveMode.FULL:
            if self.pzxy is None:
                raise DimensionError("FULL mode requires pzxy (P_Z|XY).")
            if self.pzx_h0 is not None or self.qzx_h1 is not None:
                raise DimensionError(
                    "FULL mode derives pzx_h0 / qzx_h1 from pzxy; do not pass them."
                )
            if self.pzxy.n_in != nx * ny:
                raise DimensionError(
                    f"P_Z|XY has {self.pzxy.n_in} rows, expected |X||Y| = {nx * ny}."
                )
            t = self.pzxy.matrix.reshape(nx, ny, -1)
            h0 = np.einsum("xy,xyz->xz", self.pyx.matrix, t)
            h1 = np.einsum("y,xyz->xz", self.py.probs, t)
            object.__setattr__(self, "pzx_h0", CondPmf(h0, nx, self.pzxy.out_alphabet))
            object.__setattr__(self, "qzx_h1", CondPmf(h1, nx, self.pzxy.out_alphabet))
        else:
            if self.pzxy is not None:
                raise DimensionError("MARGINAL mode does not take pzxy.")
            if self.pzx_h0 is None or self.qzx_h1 is None:
                raise DimensionError("MARGINAL mode requires both pzx_h0 and qzx_h1.")
            for label, law in (("pzx_h0", self.pzx_h0), ("qzx_h1", self.qzx_h1)):
                if law.n_in != nx:
                    raise DimensionError(f"{label} has {law.n_in} rows, |X| = {nx}.")
            if self.pzx_h0.n_out != self.qzx_h1.n_out:
                raise DimensionError("pzx_h0 and qzx_h1 disagree on |Z|.")

    @property
    def x_size(self):
        return self.px.size

    @property
    def y_size(self):
        return self.pyx.n_out

    @property
    def z_size(self):
        return self.pzx_h0.n_out

    @property
    def py(self):
        """Marginal :math:`P_Y` (shared by both hypotheses)."""
        return Pmf(self.px.probs @ self.pyx.matrix, self.pyx.out_alphabet)

    @property
    def is_full(self):
        return self.eve_mode is EveMode.FULL

    def z_given_x(self, hypothesis):
        """:math:`P_{Z|X}` under H0 or :math:`Q_{Z|X}` under H1."""
        return self.pzx_h0 if Hypothesis(hypothesis) is Hypothesis.H0 else self.qzx_h1

    def joint_xy(self, hypothesis=Hypothesis.H0):
        """Joint of :math:`(X,Y)` under the given hypothesis."""
        if Hypothesis(hypothesis) is Hypothesis.H0:
            mass = self.px.probs[:, None] * self.pyx.matrix
        else:
            mass = np.outer(self.px.probs, self.py.probs)
        return JointPmf(mass, ["X", "Y"], [self.px.alphabet, self.pyx.out_alphabet])

    def joint_xz(self, hypothesis=Hypothesis.H0):
        """Joint of :math:`(X,Z)`; :math:`P_{XZ}` under H0, :math:`P_X Q_{Z|X}` under H1."""
        law = self.z_given_x(hypothesis)
        return JointPmf(
            self.px.probs[:, None] * law.matrix,
            ["X", "Z"],
            [self.px.alphabet, law.out_alphabet],
        )

    def joint_xyz(self, hypothesis=Hypothesis.H0):
        """
        Joint of :math:`(X,Y,Z)`. In MARGINAL mode :math:`Z` is drawn from :math:`X` alone,
        which reproduces the true :math:`(X,Y)` and :math:`(X,Z)` marginals.
        """
        xy = self.joint_xy(hypothesis)
        if self.is_full:
            return compose(xy, self.pzxy, ["X", "Y"], "Z")
        return compose(xy, self.z_given_x(hypothesis), ["X"], "Z")
