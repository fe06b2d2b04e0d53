import json
import math

import pytest

from recurrent_tda.denoise import DenoiseParams
from recurrent_tda.experiment import (
    ConfigError,
    ExperimentConfig,
    config_from_dict,
    default_filters,
    parse_config,
    run_experiment,
)
from recurrent_tda.synth import SignalSpec


def write_config(tmp_path, payload):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload))
    return path


class TestParseConfig:
    def test_empty_config_gets_paper_defaults(self, tmp_path):
        cfg = parse_config(write_config(tmp_path, {}))
        assert cfg.signal == SignalSpec()
        assert cfg.signal.n == 500
        labels = [f.effective_label for f in cfg.filters]
        assert labels == [
            "ellipsoidal",
            "spherical",
            "knn",
            "moving_average",
            "adaptive_moving_average",
        ]
        by_label = {f.effective_label: f for f in cfg.filters}
        assert by_label["knn"].k == 20
        assert by_label["moving_average"].window == 20
        assert by_label["adaptive_moving_average"].segment == 100

    def test_single_snr_override(self, tmp_path):
        cfg = parse_config(write_config(tmp_path, {"snr_db_list": [20]}))
        assert cfg.snr_db_list == (20.0,)
        assert cfg.signal == SignalSpec()

    def test_bad_filter_field_names_path(self, tmp_path):
        with pytest.raises(ConfigError, match=r"filters\[0\]\.k"):
            parse_config(write_config(tmp_path, {"filters": [{"mode": "knn", "k": 0}]}))

    def test_unknown_top_level_key_named(self, tmp_path):
        with pytest.raises(ConfigError, match="snr_list"):
            parse_config(write_config(tmp_path, {"snr_list": [10]}))

    def test_unknown_signal_key_named(self, tmp_path):
        with pytest.raises(ConfigError, match=r"signal\.fstart"):
            parse_config(write_config(tmp_path, {"signal": {"fstart": 1.0}}))

    def test_unknown_filter_key_named(self, tmp_path):
        with pytest.raises(ConfigError, match=r"filters\[1\]\.windw"):
            parse_config(
                write_config(
                    tmp_path,
                    {"filters": [{"mode": "knn"}, {"mode": "moving_average", "windw": 3}]},
                )
            )

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ConfigError, match="distinct"):
            config_from_dict({"filters": [{"mode": "knn"}, {"mode": "knn"}]})

    def test_duplicate_modes_with_labels_allowed(self):
        cfg = config_from_dict(
            {"filters": [{"mode": "knn", "label": "knn20"}, {"mode": "knn", "k": 5, "label": "knn5"}]}
        )
        assert [f.effective_label for f in cfg.filters] == ["knn20", "knn5"]

    def test_infinite_snr_allowed(self):
        cfg = config_from_dict({"snr_db_list": [math.inf, 20]})
        assert cfg.snr_db_list == (math.inf, 20.0)

    def test_negative_seed_rejected(self):
        with pytest.raises(ConfigError, match=r"seeds\[0\]"):
            config_from_dict({"seeds": [-1]})

    def test_empty_lists_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict({"snr_db_list": []})
        with pytest.raises(ConfigError):
            config_from_dict({"seeds": []})
        with pytest.raises(ConfigError):
            config_from_dict({"filters": []})


def small_config(tmp_path, **overrides):
    payload = {
        "signal": {"n": 120, "f_start": 1.0, "f_end": 4.0},
        "snr_db_list": [math.inf],
        "seeds": [0],
        "filters": [
            {"mode": "moving_average", "window": 1, "label": "identity"},
            {"mode": "knn", "k": 5},
        ],
        "output_dir": str(tmp_path / "out"),
    }
    payload.update(overrides)
    return config_from_dict(payload)


class TestRunExperiment:
    def test_identity_filter_on_clean_signal_scores_zero(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RECURRENT_TDA_THREADS", "1")
        report = run_experiment(small_config(tmp_path))
        identity_rows = [r for r in report.rows if r.filter_label == "identity"]
        assert len(identity_rows) == 2
        assert all(r.rmse == 0.0 for r in identity_rows)
        assert report.internal_errors == 0

    def test_row_count_contract(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RECURRENT_TDA_THREADS", "1")
        cfg = small_config(
            tmp_path,
            snr_db_list=[20.0],
            seeds=[0, 1],
            filters=[{"mode": "knn", "k": 5}, {"mode": "moving_average"}],
        )
        report = run_experiment(cfg)
        assert len(report.rows) == 1 * 2 * 2 * 2
        combos = {(r.snr_db, r.seed, r.filter_label, r.channel) for r in report.rows}
        assert len(combos) == len(report.rows)

    def test_results_csv_layout(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RECURRENT_TDA_THREADS", "1")
        report = run_experiment(small_config(tmp_path))
        lines = (tmp_path / "out" / "results.csv").read_text().splitlines()
        assert lines[0] == "snr_db,seed,filter,channel,rmse"
        assert len(lines) == 1 + len(report.rows)
        assert lines[1].startswith("inf,0,identity,0,")

    def test_rerun_is_byte_identical(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RECURRENT_TDA_THREADS", "1")
        cfg = small_config(tmp_path, snr_db_list=[15.0], seeds=[3])
        run_experiment(cfg)
        first = (tmp_path / "out" / "results.csv").read_bytes()
        run_experiment(cfg)
        second = (tmp_path / "out" / "results.csv").read_bytes()
        assert first == second

    def test_parallel_matches_serial(self, tmp_path, monkeypatch):
        cfg = small_config(tmp_path, seeds=[0, 1, 2])
        monkeypatch.setenv("RECURRENT_TDA_THREADS", "1")
        run_experiment(cfg)
        serial = (tmp_path / "out" / "results.csv").read_bytes()
        monkeypatch.setenv("RECURRENT_TDA_THREADS", "2")
        run_experiment(cfg)
        parallel = (tmp_path / "out" / "results.csv").read_bytes()
        assert serial == parallel

    def test_topological_runs_emit_diagrams(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RECURRENT_TDA_THREADS", "1")
        cfg = small_config(
            tmp_path,
            signal={"n": 80, "f_start": 1.0, "f_end": 2.0},
            snr_db_list=[30.0],
            filters=[{"mode": "spherical"}],
        )
        report = run_experiment(cfg)
        assert report.declared_failures == 0
        diagram = tmp_path / "out" / "diagram_snr30_seed0_spherical.csv"
        assert diagram.exists()
        assert diagram.read_text().splitlines()[0] == "dim,birth,death"

    def test_no_loop_becomes_nan_row_and_warning(self, tmp_path, monkeypatch, caplog):
        monkeypatch.setenv("RECURRENT_TDA_THREADS", "1")
        # a straight line has no recurrent loop
        cfg = config_from_dict(
            {
                "signal": {"n": 40, "f_start": 0.001, "f_end": 0.001, "t_max": 0.5},
                "snr_db_list": [math.inf],
                "seeds": [0],
                "filters": [{"mode": "spherical"}],
                "output_dir": str(tmp_path / "out"),
            }
        )
        with caplog.at_level("WARNING"):
            report = run_experiment(cfg)
        assert report.declared_failures == 1
        assert report.internal_errors == 0
        assert all(math.isnan(r.rmse) for r in report.rows)
        assert any("no recurrent loop" in r.message for r in caplog.records)

    def test_invalid_threads_env_rejected(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RECURRENT_TDA_THREADS", "many")
        with pytest.raises(ValueError, match="RECURRENT_TDA_THREADS"):
            run_experiment(small_config(tmp_path))


class TestExperimentConfigType:
    def test_requires_distinct_labels(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(
                signal=SignalSpec(),
                snr_db_list=(20.0,),
                seeds=(0,),
                filters=(DenoiseParams(mode="knn"), DenoiseParams(mode="knn")),
                output_dir="out",
            )

    def test_default_filters_cover_all_modes(self):
        modes = [f.mode for f in default_filters()]
        assert modes == [
            "ellipsoidal",
            "spherical",
            "knn",
            "moving_average",
            "adaptive_moving_average",
        ]
