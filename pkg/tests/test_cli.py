import json
import math
import os
import sys

import pytest
from scipy.integrate import quad
from scipy.special import beta as beta_fn

# Ensure the package root (one level up) is on sys.path so tests can import `core`.
ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from core import artifacts  # noqa: E402
from core.cli import RunConfig, build_parser, main, seed_fixtures  # noqa: E402
from core.errors import ConfigError, DomainError  # noqa: E402
from core.estimates import necessity_limit_check, remaining_radius_rhs  # noqa: E402
from core.hessian_radial import ProblemSpec  # noqa: E402
from core.nonlinearity import ExpMinusOne, PowerLaw, ko_integral  # noqa: E402
from core.ode_ivp import blowup_radius  # noqa: E402

QUADRATIC = '{"kind": "power", "p": 2}'
LINEAR = '{"kind": "power", "p": 1}'
K_QUADRATIC = math.sqrt(1.5) * beta_fn(1.0 / 6.0, 0.5) / 3.0


def run_cli(tmp_path, *argv):
    return main(["--output-dir", str(tmp_path), "--log-level", "WARNING", *argv])


def load(tmp_path, name):
    with open(os.path.join(str(tmp_path), name), "r", encoding="utf-8") as f:
        return json.load(f)


def read_bytes(path):
    with open(path, "rb") as f:
        return f.read()


def test_ko_command(tmp_path, capsys):
    assert run_cli(tmp_path, "ko", "--nl", QUADRATIC) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["command"] == "ko"
    assert out["classification"] == "holds"
    assert out["regularity"] == "checked"
    assert out["report"]["verdict"] == "converges"
    assert out["report"]["value"] == pytest.approx(K_QUADRATIC, abs=1e-7)
    assert load(tmp_path, "ko.json") == out


def test_ko_command_diverging(tmp_path):
    assert run_cli(tmp_path, "ko", "--nl", LINEAR) == 0
    doc = load(tmp_path, "ko.json")
    assert doc["classification"] == "fails"
    assert doc["report"]["verdict"] == "diverges"
    assert doc["report"]["reason"] == "tail"


def test_scan_command_is_deterministic(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    for out in (first, second):
        assert run_cli(out, "scan", "--nl", QUADRATIC, "--betas", "1", "10", "100") == 0
    assert read_bytes(first / "scan.csv") == read_bytes(second / "scan.csv")
    rows = artifacts.read_csv(str(first / "scan.csv"))
    values = [float(r["K_beta"]) for r in rows]
    assert values[0] > values[1] > values[2]


def test_blowup_command(tmp_path):
    assert run_cli(tmp_path, "blowup", "--nl", QUADRATIC, "--N", "3", "--beta", "1") == 0
    est = load(tmp_path, "blowup.json")["estimate"]
    assert est["verdict"] == "blowup"
    assert 0 < est["width"] <= 1e-4
    assert os.path.exists(tmp_path / "trajectory.csv")
    assert os.path.exists(tmp_path / "trajectory.json")


def test_blowup_command_global_solution(tmp_path):
    assert run_cli(tmp_path, "blowup", "--nl", LINEAR, "--N", "3", "--beta", "1", "--rmax", "50") == 0
    est = load(tmp_path, "blowup.json")["estimate"]
    assert est["verdict"] == "no_blowup_up_to"
    assert est["r_max"] == 50.0
    assert est["rho_high"] == "inf"


def test_dirichlet_command_quadratic(tmp_path):
    nl = json.dumps({"kind": "constant", "c": math.sqrt(3.0)})
    code = run_cli(tmp_path, "dirichlet", "--nl", nl, "--N", "3", "--k", "2", "--R", "2", "--c", "5",
                   "--grid-size", "64")
    assert code == 0
    doc = load(tmp_path, "dirichlet.json")
    assert doc["beta_star"] == pytest.approx(3.0, rel=1e-9)
    assert doc["supersolution"] is None
    entry = doc["solutions"][0]
    assert entry["admissible"] and entry["above_subsolution"]
    assert entry["below_supersolution"] is None
    assert os.path.exists(tmp_path / "subsolution.csv")
    assert os.path.exists(tmp_path / "solution_shooting.csv")
    assert not os.path.exists(tmp_path / "supersolution.csv")


def test_dirichlet_command_both_methods(tmp_path):
    code = run_cli(tmp_path, "dirichlet", "--nl", LINEAR, "--N", "3", "--R", "1", "--c", "2",
                   "--method", "both", "--grid-size", "256")
    assert code == 0
    doc = load(tmp_path, "dirichlet.json")
    assert doc["beta_star"] == pytest.approx(2.0 / math.sinh(1.0), rel=1e-8)
    assert doc["max_difference"] <= 1e-6
    assert [s["method"] for s in doc["solutions"]] == ["shooting", "monotone"]
    rows = artifacts.read_csv(str(tmp_path / "solution_monotone.csv"))
    assert len(rows) == 257
    assert float(rows[-1]["u"]) == pytest.approx(2.0)


def test_large_command(tmp_path):
    code = run_cli(tmp_path, "large", "--nl", QUADRATIC, "--N", "3", "--R", "1", "--n-values", "2", "4",
                   "--grid-size", "128")
    assert code == 0
    rows = artifacts.read_csv(str(tmp_path / "large.csv"))
    assert list(rows[0]) == ["r", "u_2", "u_4", "bound"]
    assert len(rows) == 129
    assert load(tmp_path, "large.json")["sequence"]["bounded"] is True


def test_ivp_then_verify_round_trip(tmp_path):
    ivp_dir, from_file, in_process = tmp_path / "ivp", tmp_path / "file", tmp_path / "fresh"
    assert run_cli(ivp_dir, "ivp", "--nl", QUADRATIC, "--N", "3", "--beta", "1") == 0
    ivp = load(ivp_dir, "ivp.json")
    assert ivp["trajectory"]["termination"] == "blowup_detected"
    assert ivp["energy_identity"]["relative"] <= 1e-6
    assert run_cli(from_file, "verify", "--trajectory", str(ivp_dir / "trajectory.csv")) == 0
    assert run_cli(in_process, "verify", "--nl", QUADRATIC, "--N", "3", "--beta", "1") == 0
    assert load(from_file, "verify.json")["all_passed"] is True
    assert read_bytes(from_file / "verify.csv") == read_bytes(in_process / "verify.csv")
    header = read_bytes(from_file / "verify.csv").decode().splitlines()[0]
    assert header == "inequality,lhs,rhs,slack,pass"


def test_sweep_command(tmp_path):
    code = run_cli(tmp_path, "sweep", "--betas", "1", "--ps", "1", "2", "--ks", "1", "3", "--Ns", "2", "3",
                   "--rmax", "50", "--backend", "local", "--workers", "1", "--no-cache")
    assert code == 0
    rows = artifacts.read_csv(str(tmp_path / "sweep.csv"))
    # (k=3, N=2) is the only skipped combination
    assert len(rows) == 6
    assert list(rows[0]) == artifacts.SWEEP_COLUMNS
    verdicts = {(r["p"], r["k"], r["N"]): r["verdict"] for r in rows}
    assert verdicts[("2.0", "1", "3")] == "blowup"
    assert verdicts[("1.0", "1", "3")] == "no_blowup_up_to"


def test_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "ko", "nonlinearity": {"kind": "power", "p": 3}, "beta": 2.0}))
    assert run_cli(tmp_path, "--config", str(cfg)) == 0
    doc = load(tmp_path, "ko.json")
    assert doc["report"]["beta"] == 2.0
    assert doc["config"]["nonlinearity"] == {"kind": "power", "p": 3}


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "ko", "nonlinearity": {"kind": "power", "p": 3}, "beta": 2.0}))
    assert run_cli(tmp_path, "--config", str(cfg), "ko", "--beta", "4") == 0
    assert load(tmp_path, "ko.json")["report"]["beta"] == 4.0


def test_config_error_names_the_field(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "ko", "nonlinearity": {"kind": "power", "p": 2}, "bogus": 1}))
    assert run_cli(tmp_path, "--config", str(cfg)) == 1
    err = load(tmp_path, "error.json")
    assert err["exit_code"] == 1
    assert err["type"] == "ConfigError"
    assert "bogus" in err["message"]


@pytest.mark.parametrize("argv,field", [
    (["ko"], "nonlinearity"),
    (["blowup", "--nl", QUADRATIC, "--beta", "1"], "N"),
    (["scan", "--nl", QUADRATIC, "--betas", "10", "1"], "betas"),
    (["dirichlet", "--nl", QUADRATIC, "--N", "3", "--R", "1", "--c", "2", "--method", "monotone",
      "--grid-size", "16"], "grid_size"),
    (["verify"], "nonlinearity"),
])
def test_missing_or_invalid_fields_exit_1(tmp_path, argv, field):
    assert run_cli(tmp_path, *argv) == 1
    assert load(tmp_path, "error.json")["diagnostics"]["field"] == field


def test_domain_errors_exit_1(tmp_path):
    assert run_cli(tmp_path, "blowup", "--nl", QUADRATIC, "--N", "3", "--k", "4", "--beta", "1") == 1
    assert run_cli(tmp_path, "ko", "--nl", '{"kind": "power"}') == 1
    assert run_cli(tmp_path, "ko", "--nl", "not json") == 1
    assert run_cli(tmp_path, "ko", "--beta", "abc") == 1
    assert run_cli(tmp_path, "frobnicate") == 1
    assert run_cli(tmp_path, "large", "--nl", LINEAR, "--N", "3", "--R", "1", "--n-values", "2", "4") == 1


def test_numerical_failure_exits_2(tmp_path):
    nl = json.dumps({"kind": "constant", "c": 10.0})
    assert run_cli(tmp_path, "dirichlet", "--nl", nl, "--N", "3", "--R", "2", "--c", "1") == 2
    err = load(tmp_path, "error.json")
    assert err["error"] == "numerical"
    assert err["type"] == "UnreachableBoundaryError"


def test_io_failure_exits_3(tmp_path):
    blocker = tmp_path / "not-a-dir"
    blocker.write_text("occupied")
    assert run_cli(blocker, "ko", "--nl", QUADRATIC) == 3
    assert run_cli(tmp_path, "verify", "--trajectory", str(tmp_path / "missing.csv")) == 3


def test_run_config_from_dict():
    cfg = RunConfig.from_dict({"command": "blowup", "nonlinearity": {"kind": "power", "p": 2, "k": 2}, "N": 4,
                               "beta": 1.0, "betas": None})
    assert cfg.order == 2
    assert cfg.spec().k == 2
    assert cfg.nl().k == 2
    assert "betas" not in cfg.to_dict()
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"command": "blowup", "N": 4, "beta": 1.0})
    with pytest.raises(DomainError):
        RunConfig.from_dict({"command": "blowup", "nonlinearity": {"kind": "power", "p": 2}, "N": 1, "beta": 1.0})


def test_parser_maps_flags_to_config_fields():
    args = build_parser().parse_args(["sweep", "--betas", "1", "2", "--ps", "2", "--ks", "1", "--Ns", "3",
                                      "--rmax", "10", "--no-cache"])
    assert args.command == "sweep"
    assert args.betas == [1.0, 2.0]
    assert args.r_max == 10.0
    assert args.use_cache is False


@pytest.fixture(scope="module")
def seeded(tmp_path_factory):
    path = str(tmp_path_factory.mktemp("fixtures") / "fixtures.json")
    doc = seed_fixtures(path)
    loaded = artifacts.read_json(path)
    assert loaded["fixtures"].keys() == doc["fixtures"].keys()
    return loaded["fixtures"]


def bracket_mid(entry):
    return 0.5 * (entry["rho_low"] + entry["rho_high"])


def test_seeded_closed_forms(seeded):
    assert seeded["ko_power_p2_k1_beta1"]["value"] == pytest.approx(K_QUADRATIC, abs=1e-8)
    assert seeded["shooting_linear_N3_R1_c2"]["beta_star"] == pytest.approx(2.0 / math.sinh(1.0), rel=1e-9)
    assert seeded["shooting_constant_N3_k2_R2_c5"]["beta_star"] == pytest.approx(3.0, rel=1e-9)


def test_default_tolerances_reproduce_seeded_integrals(seeded):
    assert ko_integral(PowerLaw(p=2.0), 1.0).value == pytest.approx(seeded["ko_power_p2_k1_beta1"]["value"], abs=1e-7)
    seeded_expm1 = seeded["ko_expm1_a1_k1_beta1"]["value"]
    assert ko_integral(ExpMinusOne(a=1.0), 1.0).value == pytest.approx(seeded_expm1, abs=1e-7)

    # K(1) for g = e^u - 1, k = 1, by direct quadrature with the 1/sqrt endpoint weight
    def dG(t):
        return math.expm1(t) - t - (math.e - 2.0)

    def near_part(t):
        h = t - 1.0
        if h <= 0:
            return 1.0 / math.sqrt(2.0 * (math.e - 1.0))
        return math.sqrt(h / (2.0 * dG(t)))

    def far_part(t):
        return 0.0 if t > 700.0 else 1.0 / math.sqrt(2.0 * dG(t))

    near, _ = quad(near_part, 1.0, 2.0, weight="alg", wvar=(-0.5, 0.0), epsabs=1e-13, epsrel=1e-12)
    far, _ = quad(far_part, 2.0, math.inf, epsabs=1e-13, epsrel=1e-12)
    assert seeded_expm1 == pytest.approx(near + far, abs=1e-7)


def test_default_brackets_contain_seeded_radii(seeded):
    first = seeded["blowup_power_p2_k1_N3_beta1"]
    assert first["rho_high"] - first["rho_low"] <= 1e-5
    est = blowup_radius(ProblemSpec(3, 1), PowerLaw(p=2.0), 1.0)
    assert est.rho_low - 1e-5 <= bracket_mid(first) <= est.rho_high + 1e-5

    one, four = seeded["blowup_power_p2_k2_N4_beta1"], seeded["blowup_power_p2_k2_N4_beta4"]
    assert four["rho_high"] < one["rho_low"]
    assert bracket_mid(four) == pytest.approx(bracket_mid(one) / 2.0, abs=2e-5)
    est = blowup_radius(ProblemSpec(4, 2), PowerLaw(p=2.0, k=2), 4.0)
    assert bracket_mid(est.to_dict()) == pytest.approx(bracket_mid(four), abs=1e-4)


def test_necessity_central_values_follow_the_scaling_law(seeded):
    rho_one = bracket_mid(seeded["blowup_power_p2_k1_N3_beta1"])
    entries = seeded["necessity_power_p2_k1_N3"]
    assert [e["eps"] for e in entries] == [0.5, 0.25, 0.125]
    for entry in entries:
        # rho(beta) = rho(1) / sqrt(beta) for g = u^2
        assert entry["beta"] == pytest.approx((rho_one / bracket_mid(entry)) ** 2, rel=1e-3)
        assert entry["K"] <= remaining_radius_rhs(ProblemSpec(3, 1), entry["rho_high"]) * (1.0 + 1e-6)
    reports = necessity_limit_check(PowerLaw(p=2.0), ProblemSpec(3, 1), [0.5, 0.25, 0.125])
    for report, entry in zip(reports, entries):
        assert report.metadata["beta"] == pytest.approx(entry["beta"], rel=5e-3)
