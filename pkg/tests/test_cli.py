import json
import math

import numpy as np
import pytest

from nlkg1d import ModelParams, PreconditionViolation, critical_omegas, sigma2
from nlkg1d.cli import coercivity_table, main


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return header, data


TAU8 = {"a": 1.0, "b": 1.0, "m": 2.0}
TAU105 = {"a": math.sqrt(2.0 / 1.05), "b": 1.0, "m": 1.0}


class TestConfigHandling:
    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "c.json", dict(TAU8, omg=1.9))
        assert main(["analyze", "--config", cfg]) == 2
        assert "unknown config key" in capsys.readouterr().err

    def test_unknown_nested_key_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "c.json", dict(TAU8, sim={"steps": 3}))
        assert main(["analyze", "--config", cfg]) == 2

    def test_wrong_type_rejected(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", dict(TAU8, omega="fast"))
        assert main(["profile", "--config", cfg]) == 2

    def test_missing_file(self, capsys):
        assert main(["analyze", "--config", "/nonexistent/x.json"]) == 2

    def test_missing_required_key(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {"a": 1.0, "b": 1.0})
        assert main(["analyze", "--config", cfg]) == 2

    def test_invalid_params_exit_code(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {"a": 1.0, "b": 0.5, "m": 1.0})
        assert main(["analyze", "--config", cfg]) == 2


class TestAnalyze:
    def test_supercritical_report(self, tmp_path):
        out = tmp_path / "report.json"
        cfg = write_config(tmp_path, "c.json", TAU8)
        assert main(["analyze", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["regime"] == "SUPERCRITICAL"
        assert report["omega_m"] is None
        assert report["tau"] == pytest.approx(8.0)

    def test_report_reparses_to_equal_values(self, tmp_path):
        out = tmp_path / "report.json"
        cfg = write_config(tmp_path, "c.json", TAU105)
        assert main(["analyze", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        expected = critical_omegas(ModelParams(**TAU105)).to_dict()
        assert report == json.loads(json.dumps(expected))


class TestCurve:
    def test_columns_and_shape(self, tmp_path):
        out = tmp_path / "curve.csv"
        cfg = write_config(tmp_path, "c.json", TAU8)
        assert main(["curve", "--config", cfg, "--out", str(out)]) == 0
        header, data = read_csv(out)
        assert header == ["omega", "sigma", "sigma_prime", "energy"]
        assert data.shape == (200, 4)
        assert np.all(np.diff(data[:, 1]) < 0)  # monotone charge for tau = 8

    def test_subcritical_shape_and_extrema(self, tmp_path):
        out = tmp_path / "curve.csv"
        cfg = write_config(tmp_path, "c.json", TAU105)
        assert main(["curve", "--config", cfg, "--out", str(out)]) == 0
        _, data = read_csv(out)
        omega, sig, sig_p = data[:, 0], data[:, 1], data[:, 2]
        rep = critical_omegas(ModelParams(**TAU105))
        spacing = omega[1] - omega[0]
        # decrease-increase-decrease: the sampled extrema must bracket the
        # analytic critical frequencies to one grid cell
        flips = np.flatnonzero(np.diff(np.sign(sig_p)))
        assert flips.size == 2
        assert abs(omega[flips[0]] - rep.omega_m) < spacing
        assert abs(omega[flips[1]] - rep.omega_M) < spacing
        interior_min = sig[: flips[0] + 1].min()
        assert interior_min == pytest.approx(rep.sigma_m, abs=1e-4)


class TestClassify:
    def test_two_minima_at_sigma2(self, tmp_path):
        p = ModelParams(**TAU105)
        out = tmp_path / "cls.json"
        cfg = write_config(tmp_path, "c.json", dict(TAU105, sigma=sigma2(p)))
        assert main(["classify", "--config", cfg, "--out", str(out)]) == 0
        result = json.loads(out.read_text())
        assert result["cr_count"] == 3
        assert result["k_count"] == 2
        assert len(result["branches"]) == 3


class TestProfileCommand:
    def test_csv_halfline(self, tmp_path):
        out = tmp_path / "prof.csv"
        cfg = write_config(
            tmp_path, "c.json", dict(TAU8, omega=1.9, grid={"n": 256})
        )
        assert main(["profile", "--config", cfg, "--out", str(out)]) == 0
        header, data = read_csv(out)
        assert header == ["x", "R", "Rprime"]
        assert data.shape == (257, 3)
        assert data[0, 1] == pytest.approx(ModelParams(**TAU8).r_star(1.9))

    def test_reflect_doubles_the_line(self, tmp_path):
        out = tmp_path / "prof.csv"
        cfg = write_config(
            tmp_path, "c.json", dict(TAU8, omega=1.9, grid={"n": 256})
        )
        assert main(["profile", "--config", cfg, "--out", str(out), "--reflect"]) == 0
        _, data = read_csv(out)
        assert data.shape == (513, 3)
        assert np.allclose(data[:, 1], data[::-1, 1], atol=0)
        assert np.allclose(data[:, 2], -data[::-1, 2], atol=0)


class TestHessianCommand:
    def test_report_fields(self, tmp_path):
        out = tmp_path / "h.json"
        cfg = write_config(tmp_path, "c.json", dict(TAU8, omega=1.9, grid={"n": 512}))
        assert main(["hessian", "--config", cfg, "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["min_eigenvalue"] > 0
        assert 0 <= rep["kernel_overlap"] <= 1
        assert rep["sigma_prime"] < 0


class TestSimulateCommand:
    def test_series_csv_and_determinism(self, tmp_path):
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        cfg = write_config(
            tmp_path,
            "c.json",
            dict(
                TAU8,
                omega=1.9,
                sim={
                    "t_end": 2.0,
                    "N": 512,
                    "L_d": 25.0,
                    "eps": 1e-3,
                    "seed": 9,
                    "perturbation": "random",
                },
            ),
        )
        assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        header, data = read_csv(out1)
        assert header == list(("t", "energy", "charge", "orbital_distance", "sup_norm"))
        assert data[0, 0] == 0.0

    def test_blowup_exit_code(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "c.json",
            dict(TAU8, omega=1.9, sim={"t_end": 2.0, "N": 512, "L_d": 25.0, "eps": 50.0}),
        )
        assert main(["simulate", "--config", cfg]) == 3
        assert "failed" in capsys.readouterr().err


class TestCoercivityDemo:
    def test_closed_forms_of_the_escaping_family(self):
        p = ModelParams(1.0, 0.5, 1.0, relaxed=True)
        rows = coercivity_table(p, s0=1.0, sigma_level=1.0, k_max=3)
        k1_row = rows[0]
        assert k1_row[1] == pytest.approx(8.0 / 3.0, abs=1e-15)  # 2 s0^2 (1 + 1/3)
        assert k1_row[3] == pytest.approx(2.0, abs=1e-15)
        assert k1_row[5] == pytest.approx(1.0 + 3.0 / 16.0 + 8.0 / 105.0, abs=1e-14)

    def test_quadrature_matches_closed_forms(self):
        p = ModelParams(1.0, 0.5, 1.0, relaxed=True)
        for row in coercivity_table(p, 1.0, 1.0, 50):
            assert abs(row[2] - row[1]) < 1e-10
            assert abs(row[4] - row[3]) < 1e-10
            assert abs(row[6] - row[5]) < 1e-10

    def test_energy_bounded_while_norm_grows(self):
        p = ModelParams(1.0, 0.5, 1.0, relaxed=True)
        rows = np.array(coercivity_table(p, 1.0, 1.0, 100))
        h1 = rows[:, 1] + rows[:, 3]
        growth = np.diff(h1)
        assert np.allclose(growth, 2.0, atol=1e-12)  # affine in k
        assert np.all(np.diff(rows[:, 5]) < 0)  # energy decreasing
        limit = 1.0 + 2.0 * (1.0 / 6.0 - 1.0 / 5.0 + 1.0 / 14.0)
        assert abs(rows[-1, 5] - limit) / limit < 0.01

    def test_precondition_on_the_zero_of_w(self):
        p = ModelParams(1.0, 0.5, 1.0, relaxed=True)
        with pytest.raises(PreconditionViolation):
            coercivity_table(p, s0=0.5, sigma_level=1.0, k_max=3)

    def test_cli_exit_codes(self, tmp_path):
        good = write_config(
            tmp_path, "good.json",
            {"a": 1.0, "b": 0.5, "m": 1.0, "sigma": 1.0, "demo": {"s0": 1.0, "k_max": 5}},
        )
        assert main(["coercivity-demo", "--config", good]) == 0
        bad = write_config(
            tmp_path, "bad.json",
            {"a": 1.0, "b": 0.5, "m": 1.0, "sigma": 1.0, "demo": {"s0": 0.4, "k_max": 5}},
        )
        assert main(["coercivity-demo", "--config", bad]) == 2


class TestOutputFormats:
    def test_report_as_csv(self, tmp_path):
        out = tmp_path / "report.csv"
        cfg = write_config(tmp_path, "c.json", TAU8)
        assert main(["analyze", "--config", cfg, "--out", str(out), "--format", "csv"]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "key,value"
        assert any(ln.startswith("regime,") for ln in lines)

    def test_table_as_json(self, tmp_path):
        out = tmp_path / "curve.json"
        cfg = write_config(tmp_path, "c.json", TAU8)
        assert main(["curve", "--config", cfg, "--out", str(out), "--format", "json"]) == 0
        payload = json.loads(out.read_text())
        assert payload["columns"] == ["omega", "sigma", "sigma_prime", "energy"]
        assert len(payload["rows"]) == 200

    def test_stdout_default(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "c.json", TAU8)
        assert main(["analyze", "--config", cfg]) == 0
        assert json.loads(capsys.readouterr().out)["regime"] == "SUPERCRITICAL"

    def test_curve_byte_determinism(self, tmp_path):
        out1, out2 = tmp_path / "c1.csv", tmp_path / "c2.csv"
        cfg = write_config(tmp_path, "c.json", TAU105)
        main(["curve", "--config", cfg, "--out", str(out1)])
        main(["curve", "--config", cfg, "--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()
