"""
Run configuration parsing and its error reporting.
"""
import pytest

from pyHTSecrecy.cli import load_aux, load_config, parse_config
from pyHTSecrecy.cli.tests.conftest import BUNDLED_EXAMPLE
from pyHTSecrecy.probcore import EveMode
from pyHTSecrecy.region import Baseline
from pyHTSecrecy.utility.exceptions import ConfigError

BAD_ROW = """\
name: bad_row
model:
  alphabets: {x: 2, y: 2, z: 2}
  px: [0.5, 0.5]
  pyx:
    - [0.9, 0.1]
    - [0.5, 0.6]
  eve_mode: MARGINAL
  pzx_h0: [[1, 0], [0, 1]]
  qzx_h1: [[1, 0], [0, 1]]
"""


@pytest.mark.critical
def test_bundled_example_loads():
    config = load_config(BUNDLED_EXAMPLE)
    assert config.model.eve_mode is EveMode.MARGINAL
    assert config.model.name == "example_fig2"
    region = config.block("region")
    assert len(region.rates) == 51
    assert region.rates[1] == pytest.approx(0.02) and region.rates[-1] == pytest.approx(1.0)
    assert region.baselines == tuple(Baseline)
    assert config.optimizer.u_size == 3 and config.optimizer.restarts == 2
    assert config.block("simulate").n == (4, 6, 8)
    assert config.model.px.probs[0] == pytest.approx(0.8)
    assert config.prefix == "example_fig2"


def test_bad_row_names_field_and_line(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text(BAD_ROW, encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.field == "model.pyx[1]"
    assert info.value.line == 7
    assert "line 7" in info.value.message


def test_rationals(example_data):
    example_data["model"]["px"] = ["1/3", "2/3"]
    config = parse_config(example_data)
    assert config.model.px.probs[0] == pytest.approx(1 / 3, abs=1e-15)

    example_data["model"]["px"] = ["1/0", 1]
    with pytest.raises(ConfigError) as info:
        parse_config(example_data)
    assert info.value.field == "model.px[0]"


def test_rational_tag(tmp_path):
    path = tmp_path / "aux.yaml"
    path.write_text("aux:\n  - [!rational 1/3, !rational 2/3]\n  - [1, 0]\n", encoding="utf-8")
    aux = load_aux(path, 2)
    assert aux.matrix[0, 0] == pytest.approx(1 / 3)
    with pytest.raises(ConfigError):
        load_aux(path, 3)


def test_unknown_keys(example_data):
    example_data["model"]["pzyx"] = [[1.0, 0.0]]
    with pytest.raises(ConfigError) as info:
        parse_config(example_data)
    assert info.value.field == "model.pzyx"

    del example_data["model"]["pzyx"]
    example_data["plot"] = {}
    with pytest.raises(ConfigError) as info:
        parse_config(example_data)
    assert info.value.field == "plot"


def test_mode_specific_fields(example_data, full_data):
    del full_data["model"]["pzxy"]
    with pytest.raises(ConfigError) as info:
        parse_config(full_data)
    assert info.value.field == "model.pzxy"

    example_data["model"]["eve_mode"] = "FULL"
    with pytest.raises(ConfigError) as info:
        parse_config(example_data)
    assert info.value.field == "model.pzx_h0"


def test_blocks(example_data, full_data):
    example_data["region"]["rates"] = [0.5, 0.1]
    with pytest.raises(ConfigError):
        parse_config(example_data)

    full_data["simulate"]["rate"] = 0.8
    with pytest.raises(ConfigError) as info:
        parse_config(full_data)
    assert info.value.field == "simulate"

    del full_data["simulate"]["rate"]
    config = parse_config(full_data)
    with pytest.raises(ConfigError) as info:
        config.block("region")
    assert info.value.field == "region"
    assert config.block("evaluate").epsilon == 0.0
