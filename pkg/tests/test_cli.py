import csv
import json

from pathlib import Path

import pytest

from salemgen.cli import grid_points, main, parse_point
from salemgen.config import parse_config
from salemgen.exceptions import PointParseError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
BINARY = str(CONFIGS / "binary.json")
FINITE_SWAP = str(CONFIGS / "finite_swap.json")
NEGATIVE = str(CONFIGS / "negative_r.json")


@pytest.fixture(autouse=True)
def no_config_env(monkeypatch):
    monkeypatch.delenv("SALEMGEN_CONFIG", raising=False)
    monkeypatch.delenv("SALEMGEN_THREADS", raising=False)


def _lines(capsys):
    return capsys.readouterr().out.splitlines()


def test_eval(capsys):
    assert main(["eval", "0.5", "--config", BINARY]) == 0
    assert _lines(capsys) == ["value=0.3", "bound=0"]
    assert main(["eval", "0.25", "--config", BINARY, "--method", "feq"]) == 0
    assert _lines(capsys)[0] == "value=0.09"


def test_eval_digit_literal(capsys):
    assert main(["eval", "digits:1,1;tail:zeros", "--config", FINITE_SWAP]) == 0
    assert _lines(capsys)[0] == "value=0.51"


def test_eval_uses_environment_config(capsys, monkeypatch):
    monkeypatch.setenv("SALEMGEN_CONFIG", BINARY)
    assert main(["eval", "0.5"]) == 0
    assert _lines(capsys)[0] == "value=0.3"


def test_plot(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["plot", "--config", BINARY, "--samples", "4", "--out", str(out)]) == 0
    with open(out, newline="") as fp:
        rows = list(csv.reader(fp))
    assert rows[0] == ["s", "G", "bound"]
    assert [row[:2] for row in rows[1:]] == [
        ["0", "0"],
        ["0.25", "0.09"],
        ["0.5", "0.3"],
        ["0.75", "0.51"],
    ]


def test_integral(capsys):
    assert main(["integral", "--config", BINARY]) == 0
    assert _lines(capsys) == ["integral=0.3"]


def test_integral_with_quadrature(capsys):
    assert main(["integral", "--config", FINITE_SWAP, "--check", "quadrature"]) == 0
    lines = _lines(capsys)
    assert lines[0] == "integral=0.3"
    assert lines[1].startswith("quadrature=")
    assert float(lines[2].split("=")[1]) <= 1e-5


def test_integral_check_failure():
    args = ["integral", "--config", BINARY, "--check", "quadrature", "--tol", "1e-15"]
    assert main(args) == 5


def test_classify_jump(capsys):
    assert main(["classify", "0.5", "--config", FINITE_SWAP]) == 0
    assert _lines(capsys) == [
        "jump left=0.51 right=0.09",
        "G_D finite",
        "has some monotonicity interval",
    ]


def test_classify_identity(capsys):
    assert main(["classify", "0.5", "--config", BINARY]) == 0
    assert _lines(capsys) == ["continuous", "G_D empty", "strictly increasing"]


def test_sample(capsys):
    assert main(["sample", "--config", BINARY, "--n", "100000", "--seed", "3", "--ks"]) == 0
    lines = _lines(capsys)
    assert lines[:2] == ["n=100000", "seed=3"]
    assert lines[-1] == "pass=true"


def test_sample_is_reproducible(capsys):
    main(["sample", "--config", BINARY, "--n", "500"])
    first = _lines(capsys)
    main(["sample", "--config", BINARY, "--n", "500", "--threads", "2"])
    assert _lines(capsys) == first
    assert first[1] == "seed=20240601"


def test_verify_passes(capsys):
    assert main(["verify", "--config", str(CONFIGS / "uniform.json")]) == 0
    lines = _lines(capsys)
    assert len(lines) == 14
    assert all(": PASS" in line for line in lines)


@pytest.mark.parametrize(
    "argv, code",
    [
        (["eval", "0.5"], 2),
        (["eval", "0.5", "--config", "{missing}"], 4),
        (["eval", "1.5", "--config", BINARY], 3),
        (["eval", "digits:1,7;tail:zeros", "--config", BINARY], 3),
        (["eval", "0.5", "--config", BINARY, "--method", "exact"], 3),
        (["plot", "--config", BINARY, "--samples", "1", "--out", "x.csv"], 3),
        (["sample", "--config", BINARY, "--n", "0"], 3),
        (["sample", "--config", NEGATIVE, "--n", "10"], 6),
        ([], 3),
    ],
)
def test_exit_codes(tmp_path, argv, code):
    argv = [arg.replace("{missing}", str(tmp_path / "missing.json")) for arg in argv]
    assert main(argv) == code


def test_invalid_config_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"q": 2, "P": [0.5, 0.6], "R": [0.3, 0.7]}))
    assert main(["eval", "0.5", "--config", str(path)]) == 2


def test_unwritable_plot_exit_code(tmp_path):
    out = tmp_path / "missing" / "g.csv"
    assert main(["plot", "--config", BINARY, "--samples", "4", "--out", str(out)]) == 4


def test_parse_point():
    config = parse_config({"q": 2, "P": [0.5, 0.5], "R": [0.3, 0.7]})
    assert parse_point(" 0.25 ", config).digits(3) == (0, 1, 0)
    assert parse_point("digits:1;tail:max", config).digits(3) == (1, 1, 1)
    with pytest.raises(PointParseError):
        parse_point("half", config)


def test_grid_points():
    config = parse_config({"q": 3, "P": [0.2, 0.3, 0.5], "R": [0.2, 0.3, 0.5]})
    points = grid_points(config, 5)
    assert len(points) == 5
    assert points[0].digits(2) == (0, 0)
    assert points[1].digits(2) == (0, 1)


def test_eval_examples(capsys):
    assert main(["eval", "0.5", "--config", FINITE_SWAP]) == 0
    assert _lines(capsys)[0] == "value=0.09"
    assert main(["eval", "digits:;tail:zeros", "--config", BINARY]) == 0
    assert _lines(capsys)[0] == "value=0"


def test_plot_identity_map(tmp_path):
    out = tmp_path / "identity.csv"
    assert main(["plot", "--config", str(CONFIGS / "uniform.json"), "--samples", "2", "--out", str(out)]) == 0
    assert out.read_text().splitlines() == ["s,G,bound", "0,0,0", "0.5,0.5,0"]


def test_classify_negative_coefficient(capsys):
    assert main(["classify", "0.3", "--config", NEGATIVE]) == 0
    assert _lines(capsys)[-1] == "no monotonicity intervals"


def test_verify_rejects_bad_weights(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"q": 2, "P": [0.45, 0.45], "R": [0.3, 0.7]}))
    assert main(["verify", "--config", str(path)]) == 2


def test_integral_quadrature_with_skewed_weights(tmp_path, capsys):
    path = tmp_path / "skewed.json"
    path.write_text(json.dumps({"q": 2, "P": ["0.1", "0.9"], "R": [0.3, 0.7]}))
    assert main(["integral", "--config", str(path), "--check", "quadrature"]) == 0
    lines = _lines(capsys)
    assert float(lines[0].split("=")[1]) == pytest.approx(0.27 / 0.34)
    assert float(lines[2].split("=")[1]) <= 1e-5


def test_eval_feq_honors_tol(capsys):
    argv = ["eval", "digits:;tail:seeded:7", "--config", BINARY, "--method", "feq", "--tol", "1e-3"]
    assert main(argv) == 0
    lines = _lines(capsys)
    assert 0.0 < float(lines[1].split("=")[1]) <= 1e-3


def test_classify_warns_for_non_distributional_R(capsys):
    assert main(["classify", "0.3", "--config", NEGATIVE]) == 0
    captured = capsys.readouterr()
    assert "G_D empty" in captured.out
    assert "not a probability vector" in captured.err
