import json
import math

import pytest

from selreg.data import airfoil_like_spec, generate_synthetic
from selreg.experiments import (ConfigError, Table, config_from_dict,
                                run_scenario, write_csv)


def synthetic_block():
    return {"covariates": [{"uniform": [-2, 2]}], "mean": "quadratic",
            "sd": "sigmoid"}


def acceptance_config(**kw):
    cfg = {"scenario": "acceptance_curve", "seed": 11, "lambda": 0.36,
           "beta": 0.05, "n": [50], "replicates": 2,
           "x_grid": {"linspace": [-2, 2, 9]},
           "synthetic": synthetic_block()}
    cfg.update(kw)
    return cfg


def read_rows(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


class TestConfigValidation:
    def test_minimal_acceptance_config(self):
        cfg = config_from_dict(acceptance_config())
        assert cfg.scenario == "acceptance_curve"
        assert cfg.n_list == (50,)
        assert len(cfg.x_grid) == 9

    def test_beta_bound_cited(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict(acceptance_config(beta=0.7))
        assert any("(0, 0.5]" in p for p in err.value.problems)

    def test_all_violations_listed(self):
        bad = acceptance_config(beta=0.7, seed="nope", n=[0])
        bad["lambda"] = -1.0
        with pytest.raises(ConfigError) as err:
            config_from_dict(bad)
        assert len(err.value.problems) >= 4

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict(acceptance_config(bogus=1))
        assert any("unknown config keys" in p for p in err.value.problems)

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError):
            config_from_dict({"scenario": "nope", "seed": 1})

    def test_missing_scenario_requirements(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict({"scenario": "excess_risk_vs_beta", "seed": 1,
                              "lambda": 0.36, "n": 100, "replicates": 2,
                              "synthetic": synthetic_block()})
        assert any("beta_list" in p for p in err.value.problems)

    def test_pointwise_requires_power_rule(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict({"scenario": "pointwise_convergence", "seed": 1,
                              "lambda": 0.36, "beta": 0.05, "n": [10, 32],
                              "replicates": 2, "synthetic": synthetic_block()})
        assert any("power" in p for p in err.value.problems)

    def test_default_grids(self):
        cfg = config_from_dict(acceptance_config(x_grid=None))
        assert len(cfg.x_grid) == 81
        assert cfg.x_grid[0] == -2.0 and cfg.x_grid[-1] == 2.0
        cfg = config_from_dict({
            "scenario": "pointwise_convergence", "seed": 1, "lambda": 0.36,
            "beta": 0.05, "n": [10], "replicates": 2,
            "h": {"power": {"c": 1.0, "exponent": -0.2}},
            "synthetic": synthetic_block()})
        assert cfg.x_grid == (-1.6, -0.5, 0.3, 0.8, 1.6)

    def test_coverage_needs_data_and_methods(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict({"scenario": "coverage_mse_sweep", "seed": 1})
        problems = " ".join(err.value.problems)
        assert "lambdas" in problems and "data" in problems


class TestWriteCsv:
    def test_seventeen_significant_digits(self, tmp_path):
        table = Table(header=("a", "b", "c"),
                      rows=[(1 / 3, 7, None), ("label", 0.1, 2.0)])
        path = tmp_path / "t.csv"
        write_csv(table, path)
        text = path.read_text()
        assert text.splitlines()[0] == "a,b,c"
        assert "0.33333333333333331" in text
        assert ",7," in text and text.splitlines()[1].endswith(",")


class TestAcceptanceCurve:
    def test_smoke_and_determinism(self, tmp_path):
        cfg = acceptance_config()
        first = run_scenario(cfg, tmp_path / "run1")
        second = run_scenario(cfg, tmp_path / "run2")
        p1 = tmp_path / "run1" / "acceptance_curve.csv"
        p2 = tmp_path / "run2" / "acceptance_curve.csv"
        assert p1.read_bytes() == p2.read_bytes()
        header, rows = read_rows(p1)
        assert header == ["x", "n", "accept_fraction"]
        assert len(rows) == 9
        assert all(0.0 <= float(r[2]) <= 1.0 for r in rows)
        assert first["outputs"] == [str(p1)]

    def test_single_sample_never_accepts(self, tmp_path):
        cfg = acceptance_config(n=[1], replicates=1)
        run_scenario(cfg, tmp_path)
        _, rows = read_rows(tmp_path / "acceptance_curve.csv")
        assert all(float(r[2]) == 0.0 for r in rows)

    def test_manifest_contents(self, tmp_path):
        cfg = acceptance_config()
        manifest = run_scenario(cfg, tmp_path)
        on_disk = json.loads((tmp_path / "manifest.json").read_text())
        assert on_disk["config"] == cfg
        assert on_disk["seed"] == 11
        assert on_disk["version"]
        assert on_disk["outputs"] == manifest["outputs"]
        assert "started" in on_disk and "finished" in on_disk


class TestExcessRiskVsN:
    def base(self, beta=0.05):
        return {"scenario": "excess_risk_vs_n", "seed": 3, "lambda": 0.36,
                "beta": beta, "n": [40, 80], "replicates": 8,
                "x_grid": [-1.6, 0.3, 1.6], "h": {"fixed": 0.35},
                "synthetic": synthetic_block()}

    def test_plugin_rows_equal_testing_when_beta_half(self, tmp_path):
        run_scenario(self.base(beta=0.5), tmp_path)
        _, rows = read_rows(tmp_path / "excess_risk_vs_n.csv")
        testing = [(r[0], r[1], r[3], r[4]) for r in rows if r[2] == "testing"]
        plugin = [(r[0], r[1], r[3], r[4]) for r in rows if r[2] == "plugin"]
        assert testing == plugin

    def test_excess_nonnegative_up_to_noise(self, tmp_path):
        run_scenario(self.base(), tmp_path)
        _, rows = read_rows(tmp_path / "excess_risk_vs_n.csv")
        assert rows
        for r in rows:
            assert float(r[3]) >= -3.0 * float(r[4])


class TestExcessRiskVsBeta:
    def test_acceptance_monotone_in_beta(self, tmp_path):
        cfg = {"scenario": "excess_risk_vs_beta", "seed": 5, "lambda": 0.36,
               "beta_list": [0.05, 0.2, 0.5], "n": 60, "replicates": 6,
               "x_grid": {"linspace": [-2, 2, 7]}, "h": {"fixed": 0.4},
               "synthetic": synthetic_block()}
        run_scenario(cfg, tmp_path)
        header, rows = read_rows(tmp_path / "excess_risk_vs_beta.csv")
        assert header == ["x", "beta", "method", "expected_excess", "stderr",
                          "accept_fraction"]
        by_x = {}
        for r in rows:
            by_x.setdefault(r[0], []).append((float(r[1]), float(r[5]), r[2]))
        for entries in by_x.values():
            entries.sort()
            fractions = [e[1] for e in entries]
            assert fractions == sorted(fractions)
        assert all(e[2] == "plugin" for e in entries if e[0] == 0.5)
        assert all(e[2] == "testing" for e in entries if e[0] < 0.5)


class TestExcessRiskVsBetaTradeoff:
    def test_quiet_point_improves_and_noisy_point_degrades_with_beta(self,
                                                                     tmp_path):
        # larger beta accepts more: that helps where sigma^2 < lambda and
        # hurts where sigma^2 > lambda; violations allowed up to 2 stderr
        cfg = {"scenario": "excess_risk_vs_beta", "seed": 71, "lambda": 0.36,
               "beta_list": [0.05, 0.2, 0.5], "n": 50, "replicates": 200,
               "x_grid": [-1.6, 1.6], "h": {"fixed": 0.3},
               "synthetic": synthetic_block()}
        run_scenario(cfg, tmp_path)
        _, rows = read_rows(tmp_path / "excess_risk_vs_beta.csv")
        curve = {(float(r[0]), float(r[1])): (float(r[3]), float(r[4]))
                 for r in rows}
        for beta_lo, beta_hi in ((0.05, 0.2), (0.2, 0.5)):
            lo_e, lo_s = curve[(1.6, beta_lo)]
            hi_e, hi_s = curve[(1.6, beta_hi)]
            assert hi_e >= lo_e - 2.0 * math.hypot(lo_s, hi_s)
            lo_e, lo_s = curve[(-1.6, beta_lo)]
            hi_e, hi_s = curve[(-1.6, beta_hi)]
            assert hi_e <= lo_e + 2.0 * math.hypot(lo_s, hi_s)
        # the end-to-end contrast itself is significant
        noisy_gain = curve[(1.6, 0.5)][0] - curve[(1.6, 0.05)][0]
        assert noisy_gain > 2.0 * math.hypot(curve[(1.6, 0.5)][1],
                                             curve[(1.6, 0.05)][1])
        quiet_gain = curve[(-1.6, 0.05)][0] - curve[(-1.6, 0.5)][0]
        assert quiet_gain > 2.0 * math.hypot(curve[(-1.6, 0.5)][1],
                                             curve[(-1.6, 0.05)][1])


class TestPointwiseConvergence:
    def test_regime_contrast_and_slope(self, tmp_path):
        # noisy points (sigma^2 > lambda) collapse outright; the quiet point
        # decays polynomially in n*h with a log-log slope near -1
        cfg = {"scenario": "pointwise_convergence", "seed": 72,
               "lambda": 0.36, "beta": 0.05, "n": [10, 100, 1000, 10000],
               "replicates": 100, "x_grid": [-0.5, 0.8, 1.6],
               "h": {"power": {"c": 0.5, "exponent": -0.2}},
               "synthetic": synthetic_block()}
        run_scenario(cfg, tmp_path)
        _, rows = read_rows(tmp_path / "pointwise_convergence.csv")
        curve = {(float(r[0]), int(r[1])): (float(r[2]), float(r[3]),
                                            float(r[4])) for r in rows}
        for x in (0.8, 1.6):
            nh_small, e_small, se_small = curve[(x, 10)]
            _, e_large, _ = curve[(x, 10000)]
            if e_small > 3.0 * se_small:
                assert e_large < 0.05 * e_small
            else:
                assert e_large == 0.0
        nh_lo, e_lo, _ = curve[(-0.5, 1000)]
        nh_hi, e_hi, _ = curve[(-0.5, 10000)]
        assert e_lo > 0.0 and e_hi > 0.0
        slope = math.log(e_hi / e_lo) / math.log(nh_hi / nh_lo)
        assert -1.5 <= slope <= -0.25

    def test_nh_column_tracks_power_rule(self, tmp_path):
        cfg = {"scenario": "pointwise_convergence", "seed": 7, "lambda": 0.36,
               "beta": 0.05, "n": [10, 32, 100], "replicates": 3,
               "h": {"power": {"c": 1.0, "exponent": -0.2}},
               "synthetic": synthetic_block()}
        run_scenario(cfg, tmp_path)
        header, rows = read_rows(tmp_path / "pointwise_convergence.csv")
        assert header == ["x", "n", "nh", "expected_excess", "stderr"]
        for r in rows:
            n = int(r[1])
            assert float(r[2]) == pytest.approx(n * n ** -0.2, rel=1e-15)
        n32 = {float(r[2]) for r in rows if r[1] == "32"}
        assert n32 == {32 * 0.5}


class TestCoverageSweep:
    @pytest.fixture()
    def airfoil_csv(self, tmp_path):
        ds = generate_synthetic(airfoil_like_spec(n=300, seed=2))
        path = tmp_path / "airfoil_like.csv"
        rows = [",".join(format(v, ".17g") for v in list(row) + [y])
                for row, y in zip(ds.x, ds.y)]
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        return path

    def coverage_config(self, csv_path, **kw):
        cfg = {"scenario": "coverage_mse_sweep", "seed": 13,
               "lambdas": [0.0, 2.0, 8.0, 20.0, 50.0],
               "beta_list": [0.05, 0.5],
               "h": {"fixed": 0.6},
               "data": {"csv": str(csv_path), "target_column": 5,
                        "has_header": False, "pivot_feature": 1,
                        "standardize": True}}
        cfg.update(kw)
        return cfg

    def test_lambda_zero_rejects_everything(self, tmp_path, airfoil_csv):
        run_scenario(self.coverage_config(airfoil_csv), tmp_path / "out")
        header, rows = read_rows(tmp_path / "out" / "coverage_mse_sweep.csv")
        assert header == ["lambda", "method", "accept_fraction", "mse_accepted"]
        zero_rows = [r for r in rows if float(r[0]) == 0.0]
        assert zero_rows
        for r in zero_rows:
            assert float(r[2]) == 0.0
            assert r[3] == ""

    def test_acceptance_monotone_in_lambda_and_beta(self, tmp_path,
                                                    airfoil_csv):
        run_scenario(self.coverage_config(airfoil_csv), tmp_path / "out")
        _, rows = read_rows(tmp_path / "out" / "coverage_mse_sweep.csv")
        by_method = {}
        for r in rows:
            by_method.setdefault(r[1], []).append((float(r[0]), float(r[2])))
        for entries in by_method.values():
            entries.sort()
            fractions = [e[1] for e in entries]
            assert fractions == sorted(fractions)
        for lam in {float(r[0]) for r in rows}:
            low = [float(r[2]) for r in rows
                   if float(r[0]) == lam and r[1] == "beta=0.05"]
            high = [float(r[2]) for r in rows
                    if float(r[0]) == lam and r[1] == "plugin"]
            assert low[0] <= high[0]

    def test_z_direct_mode(self, tmp_path, airfoil_csv):
        cfg = self.coverage_config(airfoil_csv)
        del cfg["beta_list"]
        cfg["z_list"] = [0.0, 1.6448536269514722, 10.0]
        run_scenario(cfg, tmp_path / "out")
        _, rows = read_rows(tmp_path / "out" / "coverage_mse_sweep.csv")
        labels = {r[1] for r in rows}
        assert labels == {"z=0", "z=1.64485", "z=10"}
        for lam in {float(r[0]) for r in rows}:
            fr = {r[1]: float(r[2]) for r in rows if float(r[0]) == lam}
            assert fr["z=10"] <= fr["z=1.64485"] <= fr["z=0"]

    def test_manifest_hashes_inputs(self, tmp_path, airfoil_csv):
        manifest = run_scenario(self.coverage_config(airfoil_csv),
                                tmp_path / "out")
        assert str(airfoil_csv) in manifest["input_hashes"]
        digest = manifest["input_hashes"][str(airfoil_csv)]
        assert len(digest) == 40 and int(digest, 16) >= 0

    def test_presplit_csv_path(self, tmp_path, airfoil_csv):
        from selreg import covariate_shift_split, ShiftSplit, load_csv
        full = load_csv(airfoil_csv, target_column=5)
        train, test = covariate_shift_split(
            full, ShiftSplit(pivot_feature=1, seed=13))

        def dump(ds, name):
            path = tmp_path / name
            rows = [",".join(format(v, ".17g") for v in list(row) + [y])
                    for row, y in zip(ds.x, ds.y)]
            path.write_text("\n".join(rows) + "\n", encoding="utf-8")
            return path

        cfg = self.coverage_config(airfoil_csv)
        cfg["data"] = {"train_csv": str(dump(train, "train.csv")),
                       "test_csv": str(dump(test, "test.csv")),
                       "target_column": 5, "has_header": False,
                       "standardize": True}
        run_scenario(cfg, tmp_path / "pre")
        direct = (tmp_path / "pre" / "coverage_mse_sweep.csv").read_bytes()
        run_scenario(self.coverage_config(airfoil_csv), tmp_path / "split")
        via_split = (tmp_path / "split" / "coverage_mse_sweep.csv").read_bytes()
        assert direct == via_split
