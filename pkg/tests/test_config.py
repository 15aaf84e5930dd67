import textwrap

import pytest
from hypothesis import given, settings, strategies as st

from mdisim.config import SweepConfig, dump_config, frange, load_config, parse_config, \
    with_overrides
from mdisim.errors import ConfigError
from mdisim.sources import SourceSpec

MINIMAL = textwrap.dedent("""\
    [source]
    family = weak-coherent
    """)


def test_defaults_from_minimal_file():
    cfg = parse_config(MINIMAL)
    assert cfg == SweepConfig()
    assert cfg.losses[0] == 0.0 and cfg.losses[-1] == 80.0 and len(cfg.losses) == 81
    assert len(cfg.mu_prime_grid) == 91


def test_per_side_override():
    cfg = parse_config(MINIMAL + "[source.bob]\nfamily = poissonian-hsps\n"
                       "trigger_efficiency = 0.5\n")
    assert cfg.source_a == SourceSpec("weak-coherent")
    assert cfg.source_b == SourceSpec("poissonian-hsps", trigger_efficiency=0.5)


@pytest.mark.parametrize("name", ["weak-coherent", "poissonian-hsps",
                                  "sub-poissonian-hsps", "vacuum"])
def test_shipped_configs_round_trip(name):
    cfg = load_config(f"configs/{name}.ini")
    text = dump_config(cfg)
    assert parse_config(text) == cfg
    assert dump_config(parse_config(text)) == text


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 0.3), st.floats(1e-9, 1e-2), st.floats(0.0, 0.04),
       st.floats(0.05, 1.0), st.sampled_from(["weak-coherent", "sub-poissonian-hsps"]))
def test_round_trip_property(e_d, dark, mu, eff, family):
    cfg = with_overrides(SweepConfig(), misalignment=e_d, dark_rate=dark, mu=mu,
                         detector_efficiency=eff, source_b=SourceSpec(family))
    assert parse_config(dump_config(cfg)) == cfg


@pytest.mark.parametrize("body, message", [
    ("[channel]\nloss_step_db = zero\n", ":5: [channel] loss_step_db: cannot read"),
    ("[channel]\nloss_bogus = 1\n", ":5: [channel] loss_bogus: unknown key"),
    ("[mystery]\nx = 1\n", "unknown section [mystery]"),
    ("[protocol]\nmu = 0.5\n", "mu < mu_prime_start"),
    ("[detector]\ndark_rate = 1.5\n", "dark_rate"),
])
def test_errors_name_the_location(body, message):
    with pytest.raises(ConfigError) as err:
        parse_config(MINIMAL + "\n" + body, "cfg.ini")
    assert message in str(err.value)
    assert str(err.value).startswith("cfg.ini")


def test_missing_family():
    with pytest.raises(ConfigError, match="no source family"):
        parse_config("[detector]\ndark_rate = 1e-6\n")


def test_unknown_family():
    with pytest.raises(ConfigError, match="unknown source family"):
        parse_config("[source]\nfamily = laser\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.ini")


def test_override_validation():
    with pytest.raises(ConfigError):
        with_overrides(SweepConfig(), loss_step_db=0.0)


def test_frange_is_inclusive_and_clean():
    assert frange(0.1, 0.3, 0.1) == (0.1, 0.2, 0.3)
    assert frange(5.0, 5.0, 1.0) == (5.0,)
    assert frange(0.1, 1.0, 0.01)[-1] == 1.0
