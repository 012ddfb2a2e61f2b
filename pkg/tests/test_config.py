import math

import pytest

from qgalpha.config import ConfigError, format_config, parse_config

MINIMAL = """\
n = 64
l = 6.283185307
alpha = 0.75
k = 1.0
dt = 1e-3
t_end = 1.0
init.kind = single_mode
init.amplitude = 0.2
init.mode = 1,0
"""


def test_minimal_config():
    cfg = parse_config(MINIMAL)
    assert cfg.grid.n == 64
    assert cfg.grid.l == 6.283185307
    assert cfg.params.alpha == 0.75
    assert cfg.params.k == 1.0
    assert cfg.params.dt == 1e-3
    assert cfg.params.t_end == 1.0
    assert cfg.init.kind == "single_mode"
    assert cfg.init.amplitude == 0.2
    assert cfg.init.mode == (1, 0)
    assert cfg.params.dealias_on
    assert cfg.tolerance == 1e-6
    assert cfg.thm2_threshold == 0.05


def test_comments_and_blank_lines():
    cfg = parse_config("# header\n\n" + MINIMAL.replace("k = 1.0", "k = 2.5   # strong dissipation"))
    assert cfg.params.k == 2.5


def test_defaults():
    text = "n = 16\nalpha = 0.8\ndt = 0.01\nt_end = 2\ninit.kind = random_phase\n"
    cfg = parse_config(text)
    assert cfg.grid.l == pytest.approx(2 * math.pi)
    assert cfg.params.k == 1.0
    assert cfg.init.target_norm is None


@pytest.mark.parametrize("alpha", ["0.4", "0.5", "1.2"])
def test_alpha_range_rejected(alpha):
    with pytest.raises(ConfigError, match="1/2 < alpha <= 1"):
        parse_config(MINIMAL.replace("alpha = 0.75", f"alpha = {alpha}"))


def test_duplicate_key():
    with pytest.raises(ConfigError, match="duplicate key 'alpha'"):
        parse_config(MINIMAL + "alpha = 0.8\n")


def test_unknown_key():
    with pytest.raises(ConfigError, match="unknown key 'alhpa'"):
        parse_config(MINIMAL + "alhpa = 0.8\n")


def test_missing_required():
    with pytest.raises(ConfigError, match="missing required key 'dt'"):
        parse_config(MINIMAL.replace("dt = 1e-3\n", ""))


@pytest.mark.parametrize(
    "line,match",
    [
        ("n = 7", "even"),
        ("k = -1", "k must be > 0"),
        ("init.mode = 40, 0", "overflows"),
        ("init.mode = 1", "two comma-separated"),
        ("dealias = maybe", "boolean"),
        ("init.rng = mt19937", "pcg64"),
        ("sweep.alpha = 0.7, 0.3", "sweep.alpha"),
        ("garbage", "key = value"),
    ],
)
def test_invalid_values(line, match):
    key = line.split("=")[0].strip()
    lines = [ln for ln in MINIMAL.splitlines() if ln.split("=")[0].strip() != key]
    with pytest.raises(ConfigError, match=match):
        parse_config("\n".join(lines + [line]))


def test_sweep_lists():
    cfg = parse_config(MINIMAL + "sweep.alpha = 0.7, 0.75, 0.9\nsweep.target_norm = 0.1,0.2\nsweep.workers = 2\n")
    assert cfg.sweep == {"alpha": [0.7, 0.75, 0.9], "target_norm": [0.1, 0.2]}
    assert cfg.sweep_workers == 2


def test_format_roundtrip():
    cfg = parse_config(MINIMAL + "init.target_norm = 0.2\nrecord_every = 5\n")
    again = parse_config(format_config(cfg))
    assert again.grid == cfg.grid
    assert again.params == cfg.params
    assert again.init == cfg.init


def test_overrides():
    cfg = parse_config(MINIMAL, {"alpha": "0.9", "init.target_norm": "none"})
    assert cfg.params.alpha == 0.9
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(MINIMAL, {"bogus": "1"})
