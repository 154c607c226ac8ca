import copy
import json
from importlib.resources import files

import numpy as np
import pytest

from svbsde import io as sio
from svbsde.cli import main
from svbsde.oracles import interval_endpoints, walk_values

CONFIGS = files("svbsde") / "configs"


def load(name):
    return json.loads((CONFIGS / f"{name}.json").read_text())


def write_cfg(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


# --- config parsing ----------------------------------------------------------


def test_every_shipped_config_parses(tmp_path):
    for name in ("zero", "affine-interval", "polygon"):
        cfg = sio.ScenarioConfig.from_dict(dict(load(name), output=str(tmp_path)))
        assert cfg.build_problem().tree.steps >= 1


@pytest.mark.parametrize(
    "path, field",
    [(("problem", "tree"), "steps"), (("problem", "terminal"), "kind"), (("problem",), "driver"), ((), "seed")],
)
def test_missing_field_is_named(path, field):
    data = load("affine-interval")
    node = data
    for key in path:
        node = node[key]
    del node[field]
    with pytest.raises(sio.ConfigError, match=f"missing field '{field}'"):
        sio.ScenarioConfig.from_dict(data)


def test_unknown_suite_and_field_rejected():
    data = load("zero")
    bad = dict(data, checks=["nope"])
    with pytest.raises(sio.ConfigError, match="nope"):
        sio.ScenarioConfig.from_dict(bad)
    with pytest.raises(sio.ConfigError, match="colour"):
        sio.ScenarioConfig.from_dict(dict(data, colour="red"))


def test_missing_path_body_is_named():
    data = load("affine-interval")
    data["problem"]["tree"]["steps"] = 3
    g = {"dim": 1, "vertices": [[0.0], [1.0]]}
    data["problem"]["driver"]["G"] = {"": g, "U": g, "D": g, "UU": g, "UD": g, "DD": g}
    with pytest.raises(sio.ConfigError, match="'DU'"):
        sio.ScenarioConfig.from_dict(data)


def test_biased_tree_rejected():
    data = load("zero")
    data["problem"]["tree"]["up_probability"] = 0.7
    with pytest.raises(sio.ConfigError):
        sio.ScenarioConfig.from_dict(data)


def test_eval_poly_constant_term_first():
    np.testing.assert_allclose(sio.eval_poly([1.0, 2.0, 3.0], np.array([0.0, 1.0, -1.0])), [1.0, 6.0, 2.0])


def test_endpoint_csv_round_trip(tmp_path):
    tree = sio.tree_from_spec({"steps": 3, "horizon": 1.0})
    rng = np.random.default_rng(0)
    lo = [rng.normal(size=1 << k) for k in range(4)]
    hi = [a + 1 for a in lo]
    p = tmp_path / "e.csv"
    sio.write_text(p, sio.endpoints_csv(tree, lo, hi))
    back = sio.read_endpoints_csv(p)
    for k in range(4):
        for i, path in enumerate(tree.paths(k)):
            assert back[path] == (lo[k][i], hi[k][i])


# --- solve --------------------------------------------------------------------


def test_solve_zero_config(tmp_path, capsys):
    assert main(["solve", str(CONFIGS / "zero.json"), "--output", str(tmp_path)]) == 0
    sol = json.loads((tmp_path / "solution.json").read_text())
    assert sol["converged"] and sol["final_d_H"] == 0
    assert set(sio.read_endpoints_csv(tmp_path / "endpoints.csv").values()) == {(0.0, 0.0)}
    assert "0" in (tmp_path / "diagnostics.csv").read_text().splitlines()[1]
    assert (tmp_path / "solution.svg").read_text().startswith("<svg")
    assert "OK" in capsys.readouterr().out


def test_solve_matches_independent_oracle_file(tmp_path):
    cfg = str(CONFIGS / "affine-interval.json")
    assert main(["oracle", "interval-endpoints", "--config", cfg, "--out", str(tmp_path / "oracle.csv")]) == 0
    assert main(["solve", cfg, "--output", str(tmp_path / "run")]) == 0
    oracle = sio.read_endpoints_csv(tmp_path / "oracle.csv")
    solved = sio.read_endpoints_csv(tmp_path / "run" / "endpoints.csv")
    assert oracle.keys() == solved.keys() and len(oracle) == 2**9 - 1
    gap = max(abs(a - b) for p in oracle for a, b in zip(oracle[p], solved[p]))
    assert gap <= 1e-10


def test_oracle_from_flags_equals_direct_recursion(tmp_path):
    out = tmp_path / "o.csv"
    args = ["oracle", "interval-endpoints", "--steps", "5", "--beta", "0.5", "--g", "-1", "2"]
    assert main(args + ["--lower", "-1", "1", "--upper", "1", "1", "--out", str(out)]) == 0
    tree = sio.tree_from_spec({"steps": 5})
    bt = walk_values(5, 1.0)
    lo, hi = interval_endpoints(5, 1.0, 0.5, (-1.0, 2.0), bt - 1, bt + 1)
    back = sio.read_endpoints_csv(out)
    for k in range(6):
        for i, path in enumerate(tree.paths(k)):
            assert back[path] == (lo[k][i], hi[k][i])


def test_reruns_are_byte_identical(tmp_path):
    cfg = str(CONFIGS / "affine-interval.json")
    main(["solve", cfg, "--output", str(tmp_path / "a")])
    main(["solve", cfg, "--output", str(tmp_path / "b")])
    for name in ("solution.json", "residuals.json", "diagnostics.csv", "endpoints.csv", "solution.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_planar_solve(tmp_path):
    assert main(["solve", str(CONFIGS / "polygon.json"), "--output", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "residuals.json").read_text())
    names = {r["name"]: r for r in report["residuals"]}
    assert names["condexp_residual"]["passed"]
    assert names["integral_identity"]["passed"] is None


def test_solve_missing_field_exit_code(tmp_path, capsys):
    data = load("zero")
    del data["problem"]["tree"]["steps"]
    assert main(["solve", write_cfg(tmp_path, data)]) == 2
    assert "problem.tree is missing field 'steps'" in capsys.readouterr().err


def test_solve_unreadable_file(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert main(["solve", str(p)]) == 2


# --- check --------------------------------------------------------------------


def test_check_small_run(capsys):
    assert main(["check", "hukuhara", "geometry", "--cases", "20"]) == 0
    assert "properties passed" in capsys.readouterr().out


def test_check_negative_control_fails():
    assert main(["check", "solver-oracle", "--cases", "3", "--tolerance", "-1"]) == 1


def test_check_unknown_suite():
    assert main(["check", "nope"]) == 2


def test_check_json_output(tmp_path):
    out = tmp_path / "r.json"
    main(["check", "jensen", "--cases", "10", "--json", str(out)])
    rows = json.loads(out.read_text())
    assert rows and all("seconds" not in r for r in rows)


# --- oracle refusal and enumeration ------------------------------------------


def test_oracle_refuses_deep_enumeration(tmp_path, capsys):
    out = tmp_path / "x.json"
    assert main(["oracle", "selection-enumeration", "--steps", "20", "--out", str(out)]) == 2
    assert "cap" in capsys.readouterr().err
    assert not out.exists()


def test_selection_enumeration_two_steps(tmp_path):
    out = tmp_path / "x.json"
    assert main(["oracle", "selection-enumeration", "--steps", "2", "--dim", "2", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["max_gap"] <= 1e-10


# --- representation demo -------------------------------------------------------


def test_repr_demo(tmp_path):
    assert main(["repr", str(CONFIGS / "repr-demo.json"), "--output", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "repr.json").read_text())
    assert res["mode"] == "sampling" and res["mean_gap_decreasing"]
    assert [g["selectors"] for g in res["gaps"]] == [8, 32, 128]


def test_repr_enumeration(tmp_path):
    assert main(["repr", str(CONFIGS / "repr-enumeration.json"), "--output", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "repr.json").read_text())
    assert res["gaps"][0]["worst_gap"] <= 1e-9 and res["time_consistency"]["passed"]


def test_repr_enumeration_too_large(tmp_path):
    data = copy.deepcopy(load("repr-enumeration"))
    data["tree"]["steps"] = 8
    assert main(["repr", write_cfg(tmp_path, data), "--output", str(tmp_path)]) == 2
