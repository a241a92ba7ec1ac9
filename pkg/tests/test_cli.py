import hashlib
import json
import math
import os

import pytest

from borelsum import cli
from conftest import make_euler_spec, make_u_spec


@pytest.fixture
def euler_json(tmp_path):
    p = tmp_path / "euler.json"
    make_euler_spec().save(str(p))
    return str(p)


@pytest.fixture
def u_json(tmp_path):
    p = tmp_path / "u.json"
    make_u_spec().save(str(p))
    return str(p)


def run(args):
    return cli.main(args)


def test_borel_sum_euler(euler_json, tmp_path):
    out = str(tmp_path / "out")
    code = run(["borel-sum", "--spec", euler_json,
                "--alpha-lo", str(math.pi), "--rho", "0.2",
                "--lambda", "0.2", "--half-width", "40",
                "--nodes", "4097", "--tol", "1e-13", "--out", out])
    assert code == 0
    manifest = json.loads(open(os.path.join(out, "manifest.json")).read())
    assert manifest["diagnostics"]["max_residual"] < 1e-8
    # manifest completeness: hashes match the files on disk
    for entry in manifest["outputs"]:
        path = os.path.join(out, entry["file"])
        digest = hashlib.sha256(open(path, "rb").read()).hexdigest()
        assert digest == entry["sha256"]
    header = open(os.path.join(out, "sum.csv")).readline().strip()
    assert header == "re_x,im_x,re_y0,im_y0,residual"


def test_malformed_spec_no_partial_outputs(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json{")
    out = tmp_path / "out"
    code = run(["borel-sum", "--spec", str(bad), "--out", str(out)])
    assert code == 2
    assert not out.exists()


def test_missing_spec_is_config_error(tmp_path):
    code = run(["borel-sum", "--out", str(tmp_path / "o")])
    assert code == 2


def test_unknown_config_key(tmp_path):
    cfgp = tmp_path / "c.json"
    cfgp.write_text(json.dumps({"bogus": 1}))
    assert run(["selftest", "--config", str(cfgp)]) == 2


def test_flags_override_config(u_json, tmp_path):
    cfgp = tmp_path / "c.json"
    cfgp.write_text(json.dumps({"spec": u_json, "sqrt_eps": [0.1, 0.0],
                                "alpha_lo": 0.0, "lam": 1.5,
                                "half_width": 30.0, "nodes": 257,
                                "tol": 1e-9, "out": str(tmp_path / "o1")}))
    # alpha 0.0 from the config gives an empty strip (exit 3); the flag
    # must win and succeed
    assert run(["unfold-solve", "--config", str(cfgp)]) == 3
    assert run(["unfold-solve", "--config", str(cfgp),
                "--alpha-lo", "1.2", "--out", str(tmp_path / "o2")]) == 0


def test_unfold_domain_error_exit_code(u_json, tmp_path):
    code = run(["unfold-solve", "--spec", u_json, "--sqrt-eps", "0.1,0",
                "--alpha-lo", "0.0", "--lambda", "1.5",
                "--half-width", "30", "--out", str(tmp_path / "o")])
    assert code == 3


def test_determinism(u_json, tmp_path):
    outs = []
    for name in ("d1", "d2"):
        out = tmp_path / name
        assert run(["unfold-solve", "--spec", u_json, "--sqrt-eps", "0.1,0",
                    "--alpha-lo", "1.2", "--lambda", "1.5",
                    "--half-width", "30", "--nodes", "257",
                    "--tol", "1e-9", "--seed", "7",
                    "--out", str(out)]) == 0
        outs.append(out)
    files = sorted(p.name for p in outs[0].iterdir())
    assert files == sorted(p.name for p in outs[1].iterdir())
    for name in files:
        a = (outs[0] / name).read_bytes()
        b = (outs[1] / name).read_bytes()
        assert a == b, f"nondeterministic output {name}"


def test_bad_sqrt_eps_flag(u_json, tmp_path):
    code = run(["unfold-solve", "--spec", u_json, "--sqrt-eps", "zzz",
                "--out", str(tmp_path / "o")])
    assert code == 2


def test_normalize_requires_linear_block(tmp_path):
    assert run(["normalize", "--out", str(tmp_path / "o")]) == 2


def test_confluence_requires_direction(u_json, tmp_path):
    assert run(["confluence", "--spec", u_json,
                "--out", str(tmp_path / "o")]) == 2
