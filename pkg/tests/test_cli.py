import json

import pytest

from sadce.cli import main
from sadce.config import config_from_dict, config_to_dict, load_config
from sadce.errors import ConfigError
from sadce.harness import CSV_COLUMNS
from sadce.presets import paper_fig3_config


def reference_config_dict(**overrides):
    data = {
        "geometry": {"m_y_count": 9, "m_z_count": 9, "spacing": 0.0075, "wavelength": 0.03},
        "bs_position": [1.3, 0.0, 6.0],
        "user_box_corner_a": [-1.2, 2.5, 0.0],
        "user_box_corner_b": [3.8, 7.5, 0.0],
        "snr_grid_db": [10.0, 20.0],
        "pilot_length": 2,
        "trials": 3,
        "rng_seed": 7,
        "methods": ["sadce", "ls"],
    }
    data.update(overrides)
    return data


def test_config_roundtrip(tmp_path):
    cfg = paper_fig3_config(trials=5)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config_to_dict(cfg)))
    loaded = load_config(path)
    assert loaded == cfg


def test_config_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="snr_grid"):
        config_from_dict(reference_config_dict(snr_grid=[0.0]))
    with pytest.raises(ConfigError, match="unknown geometry keys"):
        bad = reference_config_dict()
        bad["geometry"]["rows"] = 9
        config_from_dict(bad)
    with pytest.raises(ConfigError, match="missing"):
        data = reference_config_dict()
        del data["bs_position"]
        config_from_dict(data)


def test_cli_estimate_prints_json(capsys):
    assert main(["estimate", "--seed", "3", "--snr-db", "25"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["snr_db"] == 25.0
    est = payload["estimates"]["sadce"]
    assert not est["failed"]
    assert abs(est["u_hat"] - payload["truth"]["u"]) < 0.01
    assert est["nmse_db"] < -10.0
    diag = est["diagnostics"]
    assert set(diag) == {"peak_iy", "peak_iz", "delta_u", "delta_v", "sigma_r"}


def test_cli_sweep_writes_csv_and_figure(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(reference_config_dict()))
    out = tmp_path / "result.csv"
    code = main(
        ["sweep", "--config", str(cfg_path), "--out", str(out), "--threads", "2", "--figures"]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 2 * 2  # two SNR points x two methods
    assert out.with_suffix(".png").exists()


def test_cli_sweep_seed_and_method_overrides(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(reference_config_dict()))
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    main(["sweep", "--config", str(cfg_path), "--out", str(out_a), "--method", "sadce", "--seed", "11"])
    main(["sweep", "--config", str(cfg_path), "--out", str(out_b), "--method", "sadce", "--seed", "11"])
    assert out_a.read_bytes() == out_b.read_bytes()
    rows = out_a.read_text().splitlines()[1:]
    assert all(line.startswith("sadce,") for line in rows)


def test_cli_rejects_bad_config(tmp_path, capsys):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps(reference_config_dict(snr_grid_db=[])))
    code = main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_cli_paper_fig3_preset(tmp_path, capsys):
    out = tmp_path / "fig3" / "fig3.csv"
    dump = tmp_path / "fig3.json"
    code = main(
        [
            "paper-fig3",
            "--out", str(out),
            "--trials", "2",
            "--threads", "2",
            "--dump-config", str(dump),
        ]
    )
    assert code == 0
    assert out.exists() and out.with_suffix(".png").exists()
    rows = out.read_text().splitlines()[1:]
    lens = [int(line.split(",")[2]) for line in rows if line.startswith("sadce,")]
    assert lens == [1, 2, 4, 8, 16]
    loaded = load_config(dump)
    assert loaded.trials == 2
    assert loaded == paper_fig3_config(trials=2)


def test_cli_paper_fig2_no_figures(tmp_path):
    out = tmp_path / "fig2.csv"
    code = main(["paper-fig2", "--out", str(out), "--trials", "2", "--no-figures"])
    assert code == 0
    assert out.exists() and not out.with_suffix(".png").exists()


def test_cli_selftest():
    assert main(["selftest"]) == 0
