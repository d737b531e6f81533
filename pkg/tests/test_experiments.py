import json
import math
from pathlib import Path

import numpy as np
import pytest

from qwsearch import experiments as xp
from qwsearch.dynamics import EvolutionTrace


def cfg(**kw):
    kw.setdefault("output_dir", Path("unused"))
    return xp.ExperimentConfig(**kw)


# -- config ---------------------------------------------------------------------

@pytest.mark.parametrize("kw,name", [
    ({"n": 0}, "n"),
    ({"p": 1.5}, "p"),
    ({"steps": 1}, "steps"),
    ({"ensemble_size": 0}, "size"),
    ({"gamma": "fast"}, "gamma"),
    ({"gamma": "manual:-1"}, "gamma"),
    ({"task": "dance"}, "task"),
    ({"jobs": 0}, "jobs"),
    ({"command": "plot"}, "command"),
])
def test_config_errors_name_parameter(kw, name):
    with pytest.raises(ValueError, match=f"^{name}:"):
        cfg(**kw)


def test_parse_gamma():
    assert xp.parse_gamma("exact") == ("exact_inverse_lambda1", None)
    assert xp.parse_gamma("meanfield") == ("mean_field_inv_np", None)
    assert xp.parse_gamma("manual:0.25") == ("manual", 0.25)


def test_read_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# search run\nn = 64\np=0.3\n\nt-max = 12.5  # end\n")
    assert xp.read_config_file(path) == {"n": "64", "p": "0.3", "t_max": "12.5"}
    path.write_text("n 64\n")
    with pytest.raises(ValueError, match="line 1"):
        xp.read_config_file(path)


def test_model_inference():
    assert xp.infer_model(cfg(p=0.1)) == "erdos_renyi"
    assert xp.infer_model(cfg(d=3)) == "random_regular"
    assert xp.infer_model(cfg()) == "complete"
    with pytest.raises(ValueError, match="^p:"):
        xp.make_graph(cfg(model="erdos_renyi"))


def test_auto_gamma_per_model():
    g = xp.make_graph(cfg(n=100, p=0.2, seed=1))
    assert xp.make_search_instance(cfg(n=100, p=0.2), g).gamma == pytest.approx(1 / 20)
    k = xp.make_graph(cfg(n=10))
    assert xp.make_search_instance(cfg(n=10), k).gamma == pytest.approx(1 / 9)


# -- io ---------------------------------------------------------------------------

def test_write_json_nan_is_null(tmp_path):
    path = xp.write_json(tmp_path / "a.json", {"x": float("nan"), "y": np.float64(1.5), "z": np.int64(3)})
    assert json.loads(path.read_text()) == {"x": None, "y": 1.5, "z": 3}


def test_csv_round_trip_exact(tmp_path):
    rng = np.random.default_rng(0)
    rows = rng.random((20, 3))
    path = xp.write_csv(tmp_path / "a.csv", ("a", "b", "c"), rows)
    header, back = xp.read_csv(path)
    assert header == ["a", "b", "c"]
    np.testing.assert_array_equal(back, rows)


def test_search_command_round_trip(tmp_path):
    c = cfg(command="search", n=60, p=0.3, seed=3, steps=50, output_dir=tmp_path)
    csv_path, json_path = xp.run_search_command(c)
    report = json.loads(json_path.read_text())
    tr = xp.read_trace(csv_path, json_path)
    assert tr.peak_value == report["peak_value"]
    assert isinstance(tr, EvolutionTrace)
    assert tr.probabilities[0] == pytest.approx(1 / 60)


def test_io_error_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        xp.run_generate(cfg(command="generate", n=5, output_dir=blocker / "sub"))


def test_spectrum_command_outputs(tmp_path):
    paths = xp.run_spectrum(cfg(command="spectrum", n=80, p=0.2, bins=10, output_dir=tmp_path))
    names = [p.name for p in paths]
    assert names == ["spectrum.csv", "spectral_report.json", "histogram.csv"]
    rep = json.loads(paths[1].read_text())
    assert rep["gamma"] == pytest.approx(1 / 16)
    assert len(paths[2].read_text().splitlines()) == 11


def test_spectrum_command_edgeless(tmp_path):
    paths = xp.run_spectrum(cfg(command="spectrum", n=5, p=0.0, output_dir=tmp_path))
    assert json.loads(paths[1].read_text())["ratio_c"] is None


# -- ensembles ------------------------------------------------------------------------

def test_ensemble_size_one_aggregate_equals_record(tmp_path):
    s = xp.run_ensemble(cfg(command="ensemble", task="search", n=40, p=0.3, ensemble_size=1, steps=40,
                            output_dir=tmp_path))
    rec = s.records[0]
    for key, stats in s.aggregate.items():
        assert stats["mean"] == stats["min"] == stats["max"] == rec[key]
        assert stats["std"] == 0.0 and stats["count"] == 1


def test_ensemble_seeds_and_round_trip(tmp_path):
    c = cfg(command="ensemble", task="spectrum", n=50, p=0.2, seed=7, ensemble_size=4, output_dir=tmp_path)
    s = xp.run_ensemble(c)
    assert [r["seed"] for r in s.records] == [7, 8, 9, 10]
    assert s.check()
    back = xp.EnsembleSummary.read(tmp_path)
    assert back.records == s.records
    assert back.aggregate == json.loads(json.dumps(s.aggregate))
    assert back.check()


def test_ensemble_aggregate_statistics():
    recs = [{"lambda1": 1.0}, {"lambda1": 3.0}, {"seed": 2, "error": "boom"}]
    agg = xp.aggregate(recs)
    assert agg["lambda1"] == {"mean": 2.0, "std": 1.0, "min": 1.0, "max": 3.0, "count": 2}


def test_ensemble_tampered_aggregate_fails_check():
    s = xp.EnsembleSummary([{"alpha": 0.5}, {"alpha": 0.7}])
    s.aggregate["alpha"]["mean"] = 0.9
    assert not s.check()


def test_ensemble_failures_recorded(tmp_path):
    # odd n*d: every regular-graph instance fails, none are fatal
    s = xp.run_ensemble(cfg(command="ensemble", task="spectrum", n=7, d=3, ensemble_size=3,
                            output_dir=tmp_path))
    assert len(s.failures) == 3
    assert all("ValueError" in r["error"] for r in s.failures)
    assert len((tmp_path / "ensemble_records.jsonl").read_text().splitlines()) == 3


def test_ensemble_parallel_matches_serial(tmp_path):
    base = dict(command="ensemble", task="transfer", n=40, p=0.3, ensemble_size=4, steps=30)
    a = xp.run_ensemble(cfg(**base, output_dir=tmp_path / "a"))
    b = xp.run_ensemble(cfg(**base, jobs=3, output_dir=tmp_path / "b"))
    assert (tmp_path / "a" / "ensemble_records.jsonl").read_bytes() == \
        (tmp_path / "b" / "ensemble_records.jsonl").read_bytes()
    assert a.records == b.records


def test_ensemble_lambda1_mean_small():
    n, p = 100, 0.5
    s = xp.run_ensemble(cfg(command="ensemble", task="spectrum", n=n, p=p, seed=0, ensemble_size=30), write=False)
    vals = s.values("lambda1")
    # zero diagonal: lambda_1 ~ (n-1)p + (1-p), spread sqrt(p(1-p))
    assert abs(vals.mean() - ((n - 1) * p + 1 - p)) <= 4 * math.sqrt(p * (1 - p)) / math.sqrt(30)


# -- figures ---------------------------------------------------------------------------

def test_figure1_panel_small():
    panel = xp.figure1_panel(200, 0.3, seed=1, steps=60)
    s = panel["summary"]
    assert s["gamma"] == pytest.approx(1 / 60)
    assert panel["energies"][0] <= panel["energies"][1]
    assert panel["predicted"][0] == 0.0


def test_figure1_files(tmp_path):
    c = cfg(command="figure1", n=150, p_list=(0.2, 0.05), steps=40, output_dir=tmp_path)
    paths = xp.run_figure1(c)
    assert [p.name for p in paths] == ["figure1_p0.2_trace.csv", "figure1_p0.2_spectrum.csv",
                                       "figure1_p0.05_trace.csv", "figure1_p0.05_spectrum.csv",
                                       "figure1_summary.json"]
    header, data = xp.read_csv(paths[1])
    assert header == ["index", "energy", "lowest_pair"]
    assert data[:, 2].tolist() == [1, 1] + [0] * 148
    assert np.all(np.diff(data[:, 1]) >= 0)


@pytest.mark.slow
def test_figure1_gap_shrinks_with_p():
    gaps = {}
    for p in (0.1, 0.01):
        s = xp.figure1_panel(1000, p, seed=42, steps=100)["summary"]
        gaps[p] = s["gap_to_bulk"]
        assert s["lowest_pair_separated"]
    assert gaps[0.01] < gaps[0.1]


def test_figure2_defaults_and_determinism(tmp_path):
    base = xp.figure_defaults(cfg(command="figure2"), set())
    assert (base.n, base.p) == (100, 0.2)
    a = xp.run_figure2(xp.figure_defaults(cfg(command="figure2", output_dir=tmp_path / "a"), set()))
    b = xp.run_figure2(xp.figure_defaults(cfg(command="figure2", output_dir=tmp_path / "b"), set()))
    for x, y in zip(a, b):
        assert x.read_bytes() == y.read_bytes()


@pytest.mark.slow
def test_figure2_larger_network_beats_default():
    small = xp.figure2_result()
    large = xp.figure2_result(n=1000, p=0.1)
    assert large.peak_fidelity > small.peak_fidelity
