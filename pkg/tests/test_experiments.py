import csv
import io
import math

import pytest

from collisim.cli import main
from collisim.errors import ConfigError
from collisim.experiments import (
    REGISTRY,
    build_config,
    config_hash,
    config_lines,
    parse_config_text,
    render_csv,
    run,
)


class TestConfigParsing:
    def test_basic_lines(self):
        raw = parse_config_text(
            """
            # a comment
            experiment = fig7
            train.target = 0.5   # trailing comment

            seed = 7
            """
        )
        assert raw == {"experiment": "fig7", "train.target": "0.5", "seed": "7"}

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("experiment fig7")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("a = 1\na = 2")

    def test_unknown_experiment_rejected(self):
        with pytest.raises(ConfigError):
            build_config({"experiment": "fig99"})

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            build_config({"experiment": "fig7", "bogus.key": "1"})

    def test_override_is_typed(self):
        cfg = build_config({"experiment": "fig7", "train.max_iters": "10"})
        assert cfg.params["train.max_iters"] == 10
        with pytest.raises(ConfigError):
            build_config({"experiment": "fig7", "train.max_iters": "ten"})

    def test_seed_precedence(self, monkeypatch):
        monkeypatch.setenv("COLLISIM_SEED", "111")
        assert build_config({"experiment": "fig7"}).seed == 111
        assert build_config({"experiment": "fig7", "seed": "222"}).seed == 222
        assert (
            build_config({"experiment": "fig7", "seed": "222"}, seed_override=333).seed
            == 333
        )

    def test_missing_experiment_rejected(self):
        with pytest.raises(ConfigError):
            build_config({"seed": "1"})


class TestCsvRendering:
    def test_header_and_hash(self):
        cfg = build_config({"experiment": "fig7", "train.max_iters": "5"})
        payloads = REGISTRY["fig7"].runner(cfg)
        data = render_csv(cfg, payloads[0]).decode()
        lines = data.splitlines()
        meta = [l for l in lines if l.startswith("# ")]
        assert any(l == "# experiment = fig7" for l in meta)
        assert any(l.startswith("# config_sha256 = ") for l in meta)
        declared = next(l for l in meta if "config_sha256" in l).split(" = ")[1]
        recomputed = config_hash(config_lines(cfg, payloads[0].meta))
        assert declared == recomputed

    def test_data_parses_as_csv(self):
        cfg = build_config({"experiment": "fig7", "train.max_iters": "5"})
        payloads = REGISTRY["fig7"].runner(cfg)
        text = render_csv(cfg, payloads[0]).decode()
        body = [l for l in text.splitlines() if not l.startswith("#")]
        rows = list(csv.reader(io.StringIO("\n".join(body))))
        assert rows[0] == ["eta", "iter", "j1", "j2", "a", "cost"]
        assert len(rows) > 3

    def test_byte_identical_reruns(self):
        cfg = build_config({"experiment": "fig4c", "schedule.slots": "3000"})
        first = render_csv(cfg, REGISTRY["fig4c"].runner(cfg)[0])
        second = render_csv(cfg, REGISTRY["fig4c"].runner(cfg)[0])
        assert first == second


class TestRunners:
    def test_custom_requires_reservoirs(self):
        cfg = build_config({"experiment": "custom", "schedule.slots": "10"})
        with pytest.raises(ConfigError):
            run(cfg)

    def test_custom_trajectory(self, tmp_path):
        cfg = build_config(
            {
                "experiment": "custom",
                "reservoir.1.theta": "0.0",
                "reservoir.1.coupling": "0.01",
                "schedule.slots": "200",
            },
            out_override=str(tmp_path / "custom.csv"),
        )
        paths = run(cfg)
        assert paths[0].exists()
        header = paths[0].read_text().splitlines()
        data_start = next(i for i, l in enumerate(header) if not l.startswith("#"))
        assert header[data_start] == "slot,collided,sx,sy,sz"
        assert len(header) - data_start - 1 == 200

    def test_fig5_emits_comparison_file(self, tmp_path):
        cfg = build_config(
            {"experiment": "fig5", "scan.points": "61"},
            out_override=str(tmp_path / "fig5.csv"),
        )
        paths = run(cfg)
        assert len(paths) == 2
        assert paths[1].name == "fig5_theta_formula_comparison.csv"
        text = paths[1].read_text()
        assert "qfi_trig_closed_form" in text
        assert "qfi_determinant_formula" in text

    def test_fig7_converges_for_all_rates(self, tmp_path):
        cfg = build_config(
            {"experiment": "fig7"}, out_override=str(tmp_path / "fig7.csv")
        )
        paths = run(cfg)
        meta = {
            line.split(" = ")[0][2:]: line.split(" = ")[1]
            for line in paths[0].read_text().splitlines()
            if line.startswith("# ")
        }
        for eta in ("1.3e-05", "2.6e-05", "5.2e-05"):
            assert meta[f"converged_eta_{eta}"] == "1"

    def test_fig6_scan_maxima(self, tmp_path):
        cfg = build_config(
            {"experiment": "fig6", "scan.points": "181"},
            out_override=str(tmp_path / "fig6.csv"),
        )
        paths = run(cfg)
        meta = {
            line.split(" = ")[0][2:]: line.split(" = ")[1]
            for line in paths[0].read_text().splitlines()
            if line.startswith("# ")
        }
        assert float(meta["argmax_mirror"]) == pytest.approx(0.0, abs=1e-12)
        assert float(meta["argmax_phi2_fixed"]) == pytest.approx(0.0, abs=1e-12)
        assert float(meta["argmax_phi1_fixed"]) == pytest.approx(math.pi, abs=0.02)

    def test_no_tmp_files_left_behind(self, tmp_path):
        cfg = build_config(
            {"experiment": "fig8", "surface.steps": "9", "train.max_iters": "50"},
            out_override=str(tmp_path / "fig8.csv"),
        )
        run(cfg)
        assert not list(tmp_path.glob("*.tmp"))


class TestCli:
    def test_list_command(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        assert "fig2a" in out and "custom" in out

    def test_run_registry_id(self, tmp_path, capsys):
        out_path = tmp_path / "out.csv"
        code = main(["run", "fig7", "--out", str(out_path), "--seed", "3"])
        assert code == 0
        assert out_path.exists()
        assert "# seed = 3" in out_path.read_text()

    def test_run_config_file(self, tmp_path):
        config = tmp_path / "exp.cfg"
        config.write_text(
            "experiment = custom\n"
            "reservoir.1.theta = 0.0\n"
            "reservoir.1.coupling = 0.01\n"
            "schedule.slots = 50\n"
        )
        out_path = tmp_path / "traj.csv"
        assert main(["run", str(config), "--out", str(out_path)]) == 0
        assert out_path.exists()

    def test_run_unknown_target_fails(self, capsys):
        assert main(["run", "not-a-thing"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_invalid_config_fails(self, tmp_path, capsys):
        config = tmp_path / "bad.cfg"
        config.write_text("experiment = custom\nschedule.slots = 5\n")
        assert main(["run", str(config)]) == 2
