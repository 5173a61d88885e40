import json

import pytest

from twistring.cli import main
from twistring.config import ConfigError, load_config

P_TWISTS = ('[{"point": "p"}, {"point": "p", "twist": 1, "coeff": -1}, '
            '{"point": "p", "twist": 2}]')


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def _rows(out):
    return json.loads(out)["rows"]


def test_default_config():
    cfg = load_config()
    assert cfg.curve.discriminant == 37
    assert cfg.base_divisor.degree == 3
    assert cfg.points["p"] == cfg.curve.point(1, 0)
    assert cfg.max_degree == 8 and cfg.output_format == "json"


def test_config_file_overrides(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[translation]\npoint = 1, 0\n[points]\nr = 1/4, -5/8\n[engine]\nmax_degree = 5\n")
    cfg = load_config(str(path))
    assert cfg.translation.t == cfg.curve.point(1, 0)
    assert set(cfg.points) == {"r"}
    assert cfg.max_degree == 5


@pytest.mark.parametrize("text", [
    "[curve]\na3 = 0\na4 = 0\n",                     # cusp
    "[translation]\npoint = 1, 1\n",                 # not on the curve
    "[translation]\nkind = inversion\n",             # unsupported automorphism
    "[points]\np = 0, 1\n",                          # not on the curve
    "[engine]\nformat = xml\n",
    '[sheaf]\nbase = [{"point": "nowhere"}]\n',
])
def test_config_validation(text):
    with pytest.raises(ConfigError):
        load_config(text=text)


def test_torsion_translation_rejected():
    text = "[curve]\na3 = 0\na4 = 0\na6 = 1\n[translation]\npoint = 2, 3\n[points]\np = 0, 1\n"
    with pytest.raises(ConfigError):
        load_config(text=text)


def test_rr_command(capsys):
    code, out = _run(capsys, "rr", "--divisor", '[{"point": "infinity", "coeff": 3}]',
                     "--divisor", "[]", "--divisor", '[{"point": "p", "coeff": -1}]')
    assert code == 0
    dims = [r["computed"] for r in _rows(out) if r["object"].startswith("dim")]
    assert dims == [3, 1, 0]


def test_rr_random_needs_seed(capsys):
    code, _ = _run(capsys, "rr", "--random", "3")
    assert code == 2


def test_rr_random_is_deterministic(capsys):
    _, a = _run(capsys, "--seed", "4", "rr", "--random", "5")
    _, b = _run(capsys, "rr", "--random", "5", "--seed", "4")
    assert a == b and json.loads(a)["ok"]


def test_veff_command(capsys):
    code, out = _run(capsys, "veff", "--divisor", P_TWISTS)
    assert code == 0
    rows = {r["object"]: r for r in _rows(out)}
    assert rows["virtually effective"]["computed"] is True
    assert rows["normalized divisor"]["computed"] == [{"point": ["1", "0"], "coeff": 1}]
    code, out = _run(capsys, "veff", "--divisor",
                     '[{"point": "p"}, {"point": "p", "twist": 1, "coeff": -1}]')
    assert code == 0
    assert _rows(out)[0]["computed"] is False


def test_veff_effective_threshold(capsys):
    _, out = _run(capsys, "veff", "--divisor", '[{"point": "p", "coeff": 2}]')
    rows = {r["object"]: r for r in _rows(out)}
    assert rows["threshold n0"]["computed"] == 0


def test_sklyanin_command(capsys):
    code, out = _run(capsys, "--max-degree", "4", "sklyanin", "--params", "2,3,5",
                     "--compare-ambient")
    assert code == 0
    rows = _rows(out)
    assert all(r["ok"] for r in rows)
    assert [r["computed"] for r in rows if r["object"] == "dim (S/gS)_n"] == [3, 6, 9, 12]


def test_sklyanin_degenerate_exit_status(capsys):
    code, _ = _run(capsys, "sklyanin", "--params", "1,1,1")
    assert code == 1


def test_blowup_command_csv(capsys):
    code, out = _run(capsys, "--format", "csv", "--max-degree", "4", "blowup")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "object,degree,computed,expected,source,ok"
    assert all(line.endswith("True") for line in lines[1:])


def test_blowup_requires_degree_three(tmp_path, capsys):
    path = tmp_path / "d4.ini"
    path.write_text('[sheaf]\nbase = [{"point": "infinity", "coeff": 4}]\n')
    code, _ = _run(capsys, "--config", str(path), "blowup")
    assert code == 2


def test_cache_reuse(tmp_path, capsys):
    cache = tmp_path / "cache"
    args = ["--cache", str(cache), "--max-degree", "3", "sklyanin"]
    code1, first = _run(capsys, *args)
    assert len(list(cache.glob("*.json"))) == 1
    code2, second = _run(capsys, *args)
    assert (code1, first) == (code2, second)


def test_bad_divisor_json(capsys):
    code, _ = _run(capsys, "veff", "--divisor", "[{")
    assert code == 2
