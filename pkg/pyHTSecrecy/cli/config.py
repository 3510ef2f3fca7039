"""
Run configurations of the ``ht-secrecy`` command line tool.

A run configuration is a YAML file with a ``model`` block and one block per command
(``region``, ``evaluate``, ``simulate``), plus optional ``optimizer`` and ``output`` blocks.
Matrices are nested lists, row-major, with the conditioning variable as row index.
Probabilities may be decimals or ``"a/b"`` strings (or ``!rational`` scalars).

Every validation failure raises :py:class:`~utility.exceptions.ConfigError` naming the
offending field and, when known, its line in the file.
"""
import pathlib as pt
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
import yaml

from pyHTSecrecy.probcore import Alphabet, CondPmf, EveMode, Pmf, SourceModel
from pyHTSecrecy.probcore.distributions import NORMALIZATION_TOLERANCE
from pyHTSecrecy.region import AuxChannel, Baseline, OptimizerConfig
from pyHTSecrecy.utility.exceptions import ConfigError, HTSecrecyError
from pyHTSecrecy.utility.utils import as_real, get_loader

#: Bumped whenever a CSV header or JSON summary key changes.
SCHEMA_VERSION = 1
COMMANDS = ("region", "evaluate", "simulate")
_TOP_LEVEL = ("name", "model", "optimizer", "output") + COMMANDS
_OPTIMIZER_FIELDS = (
    "u_size",
    "restarts",
    "grid_step",
    "max_iters",
    "tol",
    "penalty_weight",
    "seed",
)


# ---------------------------------------------------------------------------------------#
# Line bookkeeping                                                                       #
# ---------------------------------------------------------------------------------------#
def _index_lines(node, path, lines):
    lines[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            child = f"{path}.{key.value}" if path else str(key.value)
            _index_lines(value, child, lines)
            lines[child] = key.start_mark.line + 1
    elif isinstance(node, yaml.SequenceNode):
        for i, value in enumerate(node.value):
            _index_lines(value, f"{path}[{i}]", lines)


class _Fields:
    """Raw config tree plus the source line of every field path."""

    def __init__(self, lines=None):
        self.lines = lines or {}

    def error(self, path, message):
        return ConfigError(path, message, self.lines.get(path))

    def mapping(self, value, path, allowed):
        if value is None:
            value = {}
        if not isinstance(value, dict):
            raise self.error(path, "expected a mapping")
        unknown = sorted(set(value) - set(allowed))
        if unknown:
            where = f"{path}.{unknown[0]}" if path else str(unknown[0])
            raise self.error(where, f"unknown key (allowed: {', '.join(allowed)})")
        return value

    def required(self, block, key, path):
        if key not in block or block[key] is None:
            raise self.error(f"{path}.{key}" if path else key, "required field is missing")
        return block[key]

    def real(self, value, path):
        try:
            return as_real(value)
        except (TypeError, ValueError) as er:
            raise self.error(path, str(er)) from None

    def integer(self, value, path, minimum=None):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise self.error(path, f"expected an integer, got {value!r}")
        value = int(value)
        if minimum is not None and value < minimum:
            raise self.error(path, f"must be >= {minimum}, got {value}")
        return value

    def reals(self, value, path):
        if not isinstance(value, (list, tuple)) or not value:
            raise self.error(path, "expected a non-empty list of numbers")
        return [self.real(v, f"{path}[{i}]") for i, v in enumerate(value)]

    def matrix(self, value, path):
        if not isinstance(value, (list, tuple)) or not value:
            raise self.error(path, "expected a non-empty list of rows")
        rows = [self.reals(row, f"{path}[{i}]") for i, row in enumerate(value)]
        widths = {len(row) for row in rows}
        if len(widths) != 1:
            raise self.error(path, f"rows have different lengths {sorted(widths)}")
        return np.array(rows, dtype=float)

    def stochastic_rows(self, rows, path):
        for i, row in enumerate(np.atleast_2d(rows)):
            if np.any(row < 0) or abs(row.sum() - 1.0) > NORMALIZATION_TOLERANCE:
                where = f"{path}[{i}]" if np.ndim(rows) == 2 else path
                raise self.error(
                    where, f"not a probability vector (sum={row.sum():.12g}, min={row.min():.3g})"
                )

    def cond(self, value, path, n_in, n_out):
        rows = self.matrix(value, path)
        if rows.shape != (n_in, n_out):
            raise self.error(
                path, f"expected a {n_in}x{n_out} matrix, got {rows.shape[0]}x{rows.shape[1]}"
            )
        self.stochastic_rows(rows, path)
        return CondPmf(rows)


# ---------------------------------------------------------------------------------------#
# Blocks                                                                                 #
# ---------------------------------------------------------------------------------------#
@dataclass(frozen=True)
class RegionBlock:
    """The ``region`` block: rates to sweep and the constraint levels."""

    rates: Tuple[float, ...]
    delta0: float
    delta1: float
    epsilon: float
    baselines: Tuple[Baseline, ...] = tuple(Baseline)

    def to_dict(self):
        return {
            "rates": list(self.rates),
            "delta0": self.delta0,
            "delta1": self.delta1,
            "epsilon": self.epsilon,
            "baselines": [b.value for b in self.baselines],
        }


@dataclass(frozen=True)
class EvaluateBlock:
    """The ``evaluate`` block."""

    epsilon: float = 0.0


@dataclass(frozen=True)
class SimulateBlock:
    """
    The ``simulate`` block.

    Exactly one of ``rate`` and ``rate_margin`` is set; ``rate_margin`` means
    :math:`R = I_P(U;X) + \\text{margin}`.
    """

    aux: AuxChannel
    epsilon: float
    n: Tuple[int, ...]
    rate: Optional[float] = None
    rate_margin: Optional[float] = None
    trials: int = 0
    seeds: Tuple[int, ...] = (0,)
    mu: Optional[float] = None
    method: str = "direct"


@dataclass(frozen=True)
class OutputBlock:
    """Where results go. ``prefix`` defaults to the model name."""

    directory: str = "results"
    prefix: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    """A parsed and validated run configuration."""

    model: SourceModel
    optimizer: OptimizerConfig
    output: OutputBlock
    region: Optional[RegionBlock] = None
    evaluate: Optional[EvaluateBlock] = None
    simulate: Optional[SimulateBlock] = None
    path: Optional[str] = None
    lines: Dict[str, int] = field(default_factory=dict, compare=False, repr=False)

    @property
    def prefix(self):
        return self.output.prefix or self.model.name

    def block(self, command):
        """The block of ``command``; a :py:class:`ConfigError` if the file has none."""
        if command not in COMMANDS:
            raise ConfigError("command", f"unknown command {command!r}")
        value = getattr(self, command)
        if value is None and command != "evaluate":
            raise ConfigError(command, f"the {command} command needs a '{command}' block")
        return value if value is not None else EvaluateBlock()


def _parse_model(fields: _Fields, raw, name):
    path = "model"
    raw = fields.mapping(
        raw,
        path,
        ("name", "alphabets", "px", "pyx", "eve_mode", "pzxy", "pzx_h0", "qzx_h1"),
    )
    sizes_raw = fields.mapping(
        fields.required(raw, "alphabets", path), f"{path}.alphabets", ("x", "y", "z")
    )
    sizes = {
        k: fields.integer(fields.required(sizes_raw, k, f"{path}.alphabets"), f"{path}.alphabets.{k}", 1)
        for k in ("x", "y", "z")
    }

    px = np.array(fields.reals(fields.required(raw, "px", path), f"{path}.px"))
    if px.size != sizes["x"]:
        raise fields.error(f"{path}.px", f"expected {sizes['x']} entries, got {px.size}")
    fields.stochastic_rows(px, f"{path}.px")
    pyx = fields.cond(fields.required(raw, "pyx", path), f"{path}.pyx", sizes["x"], sizes["y"])

    mode_raw = str(raw.get("eve_mode", "FULL")).upper()
    try:
        mode = EveMode(mode_raw)
    except ValueError:
        raise fields.error(f"{path}.eve_mode", f"must be FULL or MARGINAL, got {mode_raw!r}") from None

    kwargs = {}
    if mode is EveMode.FULL:
        for extra in ("pzx_h0", "qzx_h1"):
            if raw.get(extra) is not None:
                raise fields.error(f"{path}.{extra}", "not allowed in FULL mode (derived from pzxy)")
        kwargs["pzxy"] = fields.cond(
            fields.required(raw, "pzxy", path),
            f"{path}.pzxy",
            sizes["x"] * sizes["y"],
            sizes["z"],
        )
    else:
        if raw.get("pzxy") is not None:
            raise fields.error(f"{path}.pzxy", "not allowed in MARGINAL mode")
        for key in ("pzx_h0", "qzx_h1"):
            kwargs[key] = fields.cond(
                fields.required(raw, key, path), f"{path}.{key}", sizes["x"], sizes["z"]
            )
    try:
        return SourceModel(
            px=Pmf(px, Alphabet(sizes["x"])),
            pyx=pyx,
            eve_mode=mode,
            name=str(raw.get("name") or name or "source"),
            **kwargs,
        )
    except HTSecrecyError as er:
        raise fields.error(path, er.message) from None


def _parse_rates(fields: _Fields, raw, path):
    if isinstance(raw, dict):
        raw = fields.mapping(raw, path, ("start", "stop", "step"))
        start = fields.real(fields.required(raw, "start", path), f"{path}.start")
        stop = fields.real(fields.required(raw, "stop", path), f"{path}.stop")
        step = fields.real(fields.required(raw, "step", path), f"{path}.step")
        if not step > 0 or stop < start:
            raise fields.error(path, "need step > 0 and stop >= start")
        count = int(np.floor((stop - start) / step + 1e-9))
        rates = np.round(start + step * np.arange(count + 1), 12)
    else:
        rates = np.array(fields.reals(raw, path))
    if np.any(rates < 0):
        raise fields.error(path, "rates must be non-negative")
    if np.any(np.diff(rates) < 0):
        raise fields.error(path, "rates must be in ascending order")
    return tuple(float(r) for r in rates)


def _epsilon(fields, value, path, upper_open=True):
    eps = fields.real(value, path)
    if not (0.0 <= eps < 1.0 if upper_open else 0.0 <= eps <= 1.0):
        raise fields.error(path, f"epsilon must lie in [0, 1{')' if upper_open else ']'}, got {eps}")
    return eps


def parse_region(raw, path="region", fields=None):
    """Parse a ``region`` block (also the ``query`` echo of a region summary)."""
    fields = fields if fields is not None else _Fields()
    raw = fields.mapping(raw, path, ("rates", "delta0", "delta1", "epsilon", "baselines"))
    baselines = raw.get("baselines") or [b.value for b in Baseline]
    parsed = []
    for i, b in enumerate(baselines):
        try:
            parsed.append(Baseline(str(b).upper()))
        except ValueError:
            raise fields.error(f"{path}.baselines[{i}]", f"unknown baseline {b!r}") from None
    return RegionBlock(
        rates=_parse_rates(fields, fields.required(raw, "rates", path), f"{path}.rates"),
        delta0=fields.real(raw.get("delta0", 0.0), f"{path}.delta0"),
        delta1=fields.real(raw.get("delta1", 0.0), f"{path}.delta1"),
        epsilon=_epsilon(fields, raw.get("epsilon", 0.0), f"{path}.epsilon"),
        baselines=tuple(parsed),
    )


def parse_aux(fields: _Fields, raw, path, x_size):
    """A :math:`P_{U|X}` matrix with ``x_size`` rows."""
    rows = fields.matrix(raw, path)
    if rows.shape[0] != x_size:
        raise fields.error(path, f"expected {x_size} rows (one per x), got {rows.shape[0]}")
    fields.stochastic_rows(rows, path)
    return AuxChannel(CondPmf(rows))


def _parse_simulate(fields: _Fields, raw, model):
    path = "simulate"
    raw = fields.mapping(
        raw,
        path,
        ("aux", "rate", "rate_margin", "epsilon", "n", "trials", "seeds", "mu", "method"),
    )
    if (raw.get("rate") is None) == (raw.get("rate_margin") is None):
        raise fields.error(path, "give exactly one of 'rate' and 'rate_margin'")
    n_raw = fields.required(raw, "n", path)
    n_raw = n_raw if isinstance(n_raw, list) else [n_raw]
    seeds_raw = raw.get("seeds", [0])
    seeds_raw = seeds_raw if isinstance(seeds_raw, list) else [seeds_raw]
    method = str(raw.get("method", "direct"))
    if method not in ("direct", "chain"):
        raise fields.error(f"{path}.method", f"must be 'direct' or 'chain', got {method!r}")
    mu = raw.get("mu")
    if mu is not None:
        mu = fields.real(mu, f"{path}.mu")
        if not mu > 0:
            raise fields.error(f"{path}.mu", "must be positive")
    return SimulateBlock(
        aux=parse_aux(fields, fields.required(raw, "aux", path), f"{path}.aux", model.x_size),
        epsilon=_epsilon(fields, fields.required(raw, "epsilon", path), f"{path}.epsilon", False),
        n=tuple(fields.integer(v, f"{path}.n[{i}]", 1) for i, v in enumerate(n_raw)),
        rate=None if raw.get("rate") is None else fields.real(raw["rate"], f"{path}.rate"),
        rate_margin=(
            None
            if raw.get("rate_margin") is None
            else fields.real(raw["rate_margin"], f"{path}.rate_margin")
        ),
        trials=fields.integer(raw.get("trials", 0), f"{path}.trials", 0),
        seeds=tuple(fields.integer(v, f"{path}.seeds[{i}]", 0) for i, v in enumerate(seeds_raw)),
        mu=mu,
        method=method,
    )


def _parse_optimizer(fields: _Fields, raw):
    raw = fields.mapping(raw, "optimizer", _OPTIMIZER_FIELDS)
    overrides = {}
    for key, value in raw.items():
        if value is None:
            continue
        if key in ("grid_step", "tol", "penalty_weight"):
            overrides[key] = fields.real(value, f"optimizer.{key}")
        else:
            overrides[key] = fields.integer(value, f"optimizer.{key}")
    try:
        return OptimizerConfig.from_defaults(**overrides)
    except ValueError as er:
        raise fields.error("optimizer", str(er)) from None


def parse_config(data, lines=None, path=None):
    """
    Validate a loaded configuration tree.

    Parameters
    ----------
    data: dict
        The YAML document.
    lines: dict, optional
        Field path to 1-based source line.
    path: str, optional
        File the tree came from.

    Returns
    -------
    RunConfig
    """
    fields = _Fields(lines)
    data = fields.mapping(data, "", _TOP_LEVEL)
    model = _parse_model(fields, fields.required(data, "model", ""), data.get("name"))
    output = fields.mapping(data.get("output"), "output", ("directory", "prefix"))

    return RunConfig(
        model=model,
        optimizer=_parse_optimizer(fields, data.get("optimizer")),
        output=OutputBlock(
            directory=str(output.get("directory", "results")),
            prefix=None if output.get("prefix") is None else str(output["prefix"]),
        ),
        region=None if data.get("region") is None else parse_region(data["region"], fields=fields),
        evaluate=(
            None
            if data.get("evaluate") is None
            else EvaluateBlock(
                _epsilon(
                    fields,
                    fields.mapping(data["evaluate"], "evaluate", ("epsilon",)).get("epsilon", 0.0),
                    "evaluate.epsilon",
                )
            )
        ),
        simulate=(
            None
            if data.get("simulate") is None
            else _parse_simulate(fields, data["simulate"], model)
        ),
        path=path,
        lines=dict(fields.lines),
    )


def read_yaml(path):
    """
    Load a YAML file and index the source line of every field.

    Returns
    -------
    data: object
        The document.
    lines: dict
        Field path to 1-based line.
    """
    try:
        text = pt.Path(path).read_text(encoding="utf-8")
    except OSError as er:
        raise ConfigError("config", f"cannot read {path}: {er.strerror}") from None
    try:
        node = yaml.compose(text, Loader=get_loader())
        data = yaml.load(text, Loader=get_loader())
    except yaml.YAMLError as er:
        mark = getattr(er, "problem_mark", None)
        raise ConfigError(
            "config", f"{path} is not valid YAML: {er}", None if mark is None else mark.line + 1
        ) from None
    lines = {}
    if node is not None:
        _index_lines(node, "", lines)
    return data, lines


def load_config(path):
    """Read and validate the run configuration at ``path``."""
    data, lines = read_yaml(path)
    return parse_config(data, lines, str(path))


def load_aux(path, x_size):
    """
    Read an auxiliary channel file: either a bare matrix or a mapping with an ``aux`` key.
    """
    data, lines = read_yaml(path)
    fields = _Fields(lines)
    if isinstance(data, dict):
        data = fields.required(fields.mapping(data, "", ("aux",)), "aux", "")
    return parse_aux(fields, data, "aux", x_size)

