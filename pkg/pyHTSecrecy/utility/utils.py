"""
Utility functions for basic functionality of the py:module:`pyHTSecrecy` package.
"""
import logging
import os
import pathlib as pt
import sys
from fractions import Fraction

import numpy as np
import yaml

# -- configuration directory -- #
_bin_directory = os.path.join(pt.Path(__file__).parents[0], "../bin")
_config_directory = os.path.join(_bin_directory, "config.yaml")

#: Environment variable capping worker threads.
THREADS_ENV_VAR = "HT_SECRECY_THREADS"


def as_real(value):
    """
    Convert a config scalar to ``float``, accepting ``"a/b"`` rational strings.

    Rationals are parsed exactly by :py:class:`fractions.Fraction` before conversion, so
    ``"1/3"`` and ``"0.3"`` both land on the nearest double without decimal drift.

    Parameters
    ----------
    value: int, float or str
        The value to convert.

    Returns
    -------
    float
    """
    if isinstance(value, bool):
        raise TypeError(f"Expected a number, got boolean {value!r}.")
    if isinstance(value, (int, float, np.integer, np.floating)):
        return float(value)
    if isinstance(value, (str, Fraction)):
        try:
            return float(Fraction(str(value).strip()))
        except (ValueError, ZeroDivisionError) as er:
            raise ValueError(f"Cannot read {value!r} as a number: {er}") from er
    raise TypeError(f"Expected a number, got {type(value).__name__}.")


# defining the custom yaml loader for rational scalars
def _yaml_rational_constructor(loader: yaml.SafeLoader, node: yaml.nodes.ScalarNode):
    return as_real(loader.construct_scalar(node))


class _Loader(yaml.SafeLoader):
    pass


_Loader.add_constructor("!rational", _yaml_rational_constructor)


def get_loader():
    """The YAML loader used for package and run configuration files."""
    return _Loader


try:
    with open(_config_directory, "r") as config_file:
        htparams = yaml.load(config_file, get_loader())

except FileNotFoundError as er:
    raise FileNotFoundError(
        f"Couldn't find the configuration file! Is it at {_config_directory}? Error = {er.__repr__()}"
    )
except yaml.YAMLError as er:
    raise yaml.YAMLError(
        f"The configuration file is corrupted! Error = {er.__repr__()}"
    )

stream = (
    sys.stdout
    if htparams["system"]["logging"]["main"]["stream"] in ["STDOUT", "stdout"]
    else sys.stderr
)
htLogger = logging.getLogger("pyHTSecrecy")

ht_sh = logging.StreamHandler(stream=stream)

# create formatter and add it to the handlers
formatter = logging.Formatter(htparams["system"]["logging"]["main"]["format"])
ht_sh.setFormatter(formatter)
htLogger.addHandler(ht_sh)
htLogger.setLevel(htparams["system"]["logging"]["main"]["level"])
htLogger.propagate = False
if not htparams["system"]["logging"]["main"]["enabled"]:
    htLogger.disabled = True

mylog = htLogger

# -- Setting up the developer debugger -- #
devLogger = logging.getLogger("development_logger")

if htparams["system"]["logging"]["developer"]["enabled"]:
    _dev_directory = htparams["system"]["logging"]["developer"]["output_directory"]
    if _dev_directory is not None:
        from datetime import datetime

        pt.Path(_dev_directory).mkdir(parents=True, exist_ok=True)

        dv_fh = logging.FileHandler(
            os.path.join(
                _dev_directory,
                f"{datetime.now().strftime('%m-%d-%y_%H-%M-%S')}.log",
            )
        )
        dv_fh.setFormatter(
            logging.Formatter(htparams["system"]["logging"]["main"]["format"])
        )
        devLogger.addHandler(dv_fh)
        devLogger.setLevel("DEBUG")
        devLogger.propagate = False

    else:
        mylog.warning(
            "User enabled development logger but did not specify output directory. Dev logger will not be used."
        )
        devLogger.propagate = False
        devLogger.disabled = True
else:
    devLogger.propagate = False
    devLogger.disabled = True


class EHalo:
    """
    Spinner context manager; degrades to log lines when ``halo`` is not installed or
    spinners are disabled in the configuration.
    """

    def __new__(cls, *args, **kwargs):
        if "text" in kwargs:
            kwargs["text"] = "[pyHTSecrecy] " + kwargs["text"]
        kwargs["stream"] = sys.stderr

        if htparams["system"]["display"]["spinners"]:
            try:
                from halo import Halo

                return Halo(*args, **kwargs)
            except ImportError:
                pass
        obj = object.__new__(cls)
        obj.__init__(*args, **kwargs)
        return obj

    def __init__(self, *args, **kwargs):
        self.text = kwargs.get("text", "")

    def __enter__(self):
        mylog.info(self.text)
        return self

    def __exit__(self, exc_type, exc_value, exc_tb):
        if exc_type is None:
            mylog.info("FINISHED.")


def thread_count():
    """
    Number of worker threads to use.

    ``HT_SECRECY_THREADS`` wins over ``parallel.threads`` in ``config.yaml``; when neither
    is set every core is used.
    """
    value = os.environ.get(THREADS_ENV_VAR, "").strip()
    if not value:
        value = htparams["parallel"]["threads"]
    if value in (None, ""):
        return os.cpu_count() or 1
    try:
        count = int(value)
    except (TypeError, ValueError):
        mylog.warning(f"Ignoring non-integer thread cap {value!r}.")
        return os.cpu_count() or 1
    return max(count, 1)


def derive_rng(seed, *keys):
    """
    A :py:class:`numpy.random.Generator` whose stream depends only on ``(seed, *keys)``.
    """
    return np.random.default_rng([int(seed), *[int(k) for k in keys]])
