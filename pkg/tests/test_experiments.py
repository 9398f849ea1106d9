import json

import numpy as np
import pytest

from lrrfir.cli import main
from lrrfir.exceptions import ConfigError
from lrrfir.experiments import (RunConfig, Scenario, run_monte_carlo, run_n_sweep,
                                run_tradeoff_grid)
from lrrfir.reports import (REPORT_SCHEMA, build_report, emit_reports, format_csv,
                            read_record_csv, validate_report, write_record_csv)
from lrrfir.sim import SignalSpec, SystemModel, benchmark_system, make_dataset
from lrrfir.solver import zero_threshold


def small_cfg(**kw):
    base = dict(N=400, q=120, N_v=300, discard=200, trials=2, seed=3,
                scenarios=(Scenario("3%", 0.03, 0.3),), N_list=(400, 800))
    base.update(kw)
    return RunConfig(**base)


@pytest.fixture(scope="module")
def record():
    return make_dataset(benchmark_system(), SignalSpec(sigma_u=0.03, sigma_y=0.3, seed=4),
                        N=400, q=120, discard=200)


def test_config_roundtrip():
    cfg = small_cfg(gammas=(3.0, 1.0), sigma_u_grid=(0.0, 0.05))
    again = RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again.to_dict() == cfg.to_dict()


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"N": 0})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"bogus": 1})
    with pytest.raises(ConfigError):
        small_cfg(gammas=(1.0, 2.0))
    with pytest.raises(ConfigError):
        small_cfg(trials=0)
    with pytest.raises(ConfigError):
        small_cfg().replace(nope=1)


def test_grid_dimensions_and_monotone_smooth_part(record):
    cfg = small_cfg(gammas=tuple(np.geomspace(30, 0.3, 6)), sigma_u_grid=(0.0, 0.03, 0.1))
    res = run_tradeoff_grid(record, cfg)
    assert res.E.shape == res.C.shape == (3, 6)
    assert not res.failed.any()
    assert np.all((0 <= res.C) & (res.C <= 120))
    for row in res.smooth:
        assert np.all(np.diff(row) <= 1e-5 * row[0])
    assert len(list(res.rows())) == 18


def test_grid_gamma_above_threshold(record):
    cfg = small_cfg()
    from lrrfir.design import assemble
    p = assemble(record, cfg.sigma_u, 1.0)
    g0 = 1.5 * zero_threshold(p.A, p.b, p.W)
    res = run_tradeoff_grid(record, cfg.replace(gammas=(g0,)))
    assert res.C[0, 0] == 0
    assert res.E[0, 0] == pytest.approx(record.y @ record.y)


def test_grid_failures_keep_shape(record):
    cfg = small_cfg(gammas=(1.0, 0.1, 0.01), sigma_u_grid=(0.03,), max_iter=1, tol=1e-14)
    res = run_tradeoff_grid(record, cfg)
    assert res.E.shape == (1, 3) and res.failed.all()
    assert all(r["E"] is None for r in res.rows())


def test_grid_curves_differ_by_sigma(record):
    cfg = small_cfg(gammas=(3.0, 1.0, 0.3), sigma_u_grid=(0.0, 0.2))
    res = run_tradeoff_grid(record, cfg)
    assert not np.array_equal(res.E[0], res.E[1])


def test_monte_carlo_noiseless_fir():
    taps = [0.0, 1.0, 2.7, -0.5, 0.2]
    cfg = small_cfg(system=SystemModel.from_fir(taps), scenarios=(Scenario("0%", 0.0, 0.0),),
                    gamma=1e-7, q=10)
    res = run_monte_carlo(cfg)
    for m in ("LRR", "LS", "TLS"):
        assert res.mean("0%", m, "FIT") == pytest.approx(100.0, abs=1e-6)


def test_monte_carlo_ls_denser_than_lrr():
    cfg = small_cfg(scenarios=(Scenario("1%", 0.01, 0.1), Scenario("5%", 0.05, 0.5)))
    res = run_monte_carlo(cfg)
    for level in ("1%", "5%"):
        assert res.mean(level, "LS", "TN0") > 3 * res.mean(level, "LRR", "TN0")
    assert len(res.recovery) == 4 and not res.failures
    assert len(list(res.rows())) == 12


def test_noiseless_output_needs_explicit_gamma():
    cfg = small_cfg(scenarios=(Scenario("0%", 0.0, 0.0),), q=10)
    with pytest.raises(ConfigError):
        run_monte_carlo(cfg)


def test_single_n_sweep_equals_monte_carlo_trial():
    cfg = small_cfg(trials=1, N_list=(400,), sigma_u=0.03, sigma_y=0.3)
    sw = run_n_sweep(cfg)
    mc = run_monte_carlo(cfg)
    a = [(r["method"], r["FIT"], r["TN0"]) for r in sw.rows()]
    b = [(r["method"], r["FIT"], r["TN0"]) for r in mc.rows()]
    assert a == b


def test_n_sweep_trends():
    cfg = small_cfg(trials=2, N_list=(400, 1600, 6400))
    sw = run_n_sweep(cfg)
    Ns, lrr = sw.series("LRR", "TN0")
    assert Ns == [400, 1600, 6400]
    assert lrr[-1] <= lrr[0]
    # the dense baselines keep every tail tap, so their TN0 is q - n_l at each N
    for r in sw.rows():
        if r["method"] != "LRR":
            assert r["TN0"] == cfg.q - r["n_l"]
    with pytest.raises(ConfigError):
        run_n_sweep(cfg, N_list=(800, 400))


def test_empty_results_header_only():
    assert format_csv([], ("trial", "method")) == "trial,method\n"


def test_emit_reports_deterministic(tmp_path):
    cfg = small_cfg(trials=1)
    outs = []
    for d in ("a", "b"):
        paths = emit_reports(run_monte_carlo(cfg), cfg.to_dict(), tmp_path / d, svg=True)
        outs.append({k: p.read_bytes() for k, p in paths.items()})
    assert outs[0] == outs[1]
    report = json.loads(outs[0]["json"])
    validate_report(report)
    assert report["kind"] == "montecarlo" and report["recovery_reports"]


def test_report_schema_rejects_garbage():
    import jsonschema
    with pytest.raises(jsonschema.ValidationError):
        validate_report({"kind": "nope", "config": {}, "results": {}})
    validate_report(build_report("theory", {}, {"x": float("nan")}))
    assert REPORT_SCHEMA["properties"]["kind"]["enum"]


def test_unwritable_out_dir(tmp_path):
    f = tmp_path / "file"
    f.write_text("x")
    with pytest.raises(OSError):
        emit_reports(run_monte_carlo(small_cfg(trials=1)), {}, f / "sub")


def test_record_csv_roundtrip(tmp_path, record):
    path = write_record_csv(record, tmp_path / "r.csv")
    first = path.read_text().splitlines()[:2]
    assert first[0] == "k,u,u_tilde,y" and first[1].startswith("-118,") and first[1].endswith(",")
    back = read_record_csv(path)
    assert (back.N, back.q) == (record.N, record.q)
    for f in ("u", "u_tilde", "y"):
        np.testing.assert_array_equal(getattr(back, f), getattr(record, f))


def _write_cfg(tmp_path, **kw):
    d = small_cfg(**kw).to_dict()
    d["out_dir"] = str(tmp_path / "out")
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(d))
    return path


def test_cli_simulate_identify_theory(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    assert main(["simulate", "--config", str(cfg)]) == 0
    rec = tmp_path / "out" / "record.csv"
    assert rec.exists()
    assert main(["identify", "--config", str(cfg), "--data", str(rec), "--gamma", "2.0"]) == 0
    rep = json.loads((tmp_path / "out" / "identify_report.json").read_text())
    validate_report(rep)
    assert rep["results"]["gamma"] == 2.0 and rep["recovery_reports"]
    assert main(["theory", "--config", str(cfg), "--data", str(rec),
                 "--eps", "0.1", "--beta", "0.1"]) == 0
    th = json.loads((tmp_path / "out" / "theory_report.json").read_text())
    assert th["results"]["chebyshev_N"] == 2000
    assert 1 <= th["results"]["n_l"] < 120


def test_cli_grid_montecarlo_nsweep(tmp_path):
    cfg = _write_cfg(tmp_path, gammas=(3.0, 1.0), sigma_u_grid=(0.0, 0.03))
    out = tmp_path / "o2"
    assert main(["grid", "--config", str(cfg), "--out-dir", str(out), "--svg"]) == 0
    assert (out / "grid.csv").read_text().count("\n") == 5
    assert (out / "grid.svg").exists()
    assert main(["montecarlo", "--config", str(cfg), "--out-dir", str(out),
                 "--trials", "1", "--seed", "9"]) == 0
    rep = json.loads((out / "montecarlo_report.json").read_text())
    assert rep["config"]["seed"] == 9 and rep["config"]["trials"] == 1
    assert main(["nsweep", "--config", str(cfg), "--out-dir", str(out), "--trials", "1"]) == 0
    assert (out / "nsweep.csv").read_text().startswith("trial,N,method")


def test_cli_sigma_u_override(tmp_path):
    cfg = _write_cfg(tmp_path, gammas=(1.0,), sigma_u_grid=(0.0, 0.03))
    out = tmp_path / "o3"
    main(["grid", "--config", str(cfg), "--out-dir", str(out), "--sigma-u", "0.2"])
    rows = (out / "grid.csv").read_text().splitlines()[1:]
    assert len(rows) == 1 and rows[0].startswith("0.2,")
