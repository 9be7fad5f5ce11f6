"""CSV ingestion, table assembly, and the command line interface."""

import json
import subprocess
import sys

import numpy as np
import pytest
from click.testing import CliRunner

from resi.anoes import anoes_table, load_csv, to_csv_text, to_json_text, to_text
from resi.ci import ci_ncp_chisq
from resi.cli import main
from resi.distributions import make_stream
from resi.linmodels import cov_robust, fit_ols
from resi.special import chisq_sf
from resi.wald import resi_point, wald_stat


@pytest.fixture
def memory_csv(tmp_path):
    """98 rows shaped like a two-group clinical dataset: group/age/gender
    plus a proportion outcome."""
    rng = make_stream(123)
    n = 98
    group = np.where(np.arange(n) < 60, "case", "control")
    age = np.round(rng.normal(35.0, 10.0, n), 1)
    gender = np.where(rng.random(n) < 0.5, "female", "male")
    eta = 0.9 - 0.8 * (group == "case") - 0.02 * (age - 35.0) - 0.1 * (gender == "female")
    acc = np.clip(1 / (1 + np.exp(-eta)) + rng.normal(0, 0.08, n), 0.02, 0.98)
    path = tmp_path / "memory.csv"
    lines = ["group,age,gender,accuracy"]
    for g, a, s, y in zip(group, age, gender, acc):
        lines.append(f"{g},{a},{s},{y:.4f}")
    path.write_text("\n".join(lines) + "\n")
    return path


class TestLoadCsv:
    def test_clinical_shape(self, memory_csv):
        data, fmap = load_csv(memory_csv, "accuracy", ["group", "age", "gender"], "binomial")
        assert data.X.shape == (98, 4)  # intercept + 3 single-column factors
        assert fmap == {"group": (1,), "age": (2,), "gender": (3,)}
        assert np.all(data.X[:, 0] == 1.0)

    def test_three_level_factor_expands_to_two_columns(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("y,dose\n1.0,low\n2.0,mid\n3.0,high\n2.5,mid\n1.5,low\n2.2,high\n")
        data, fmap = load_csv(path, "y", ["dose"])
        assert data.X.shape == (6, 3)
        assert fmap["dose"] == (1, 2)
        # reference level 'high' is first alphabetically; its rows are all-zero
        assert np.all(data.X[[2, 5], 1:] == 0.0)

    def test_duplicate_columns_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("y,x,x\n1,2,3\n")
        with pytest.raises(ValueError, match="duplicate"):
            load_csv(path, "y", ["x"])

    def test_missing_column_rejected(self, memory_csv):
        with pytest.raises(ValueError, match="missing columns: iq"):
            load_csv(memory_csv, "accuracy", ["group", "iq"])

    def test_missing_values_report_row_numbers(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("y,x\n1.0,2\n,3\n2.0,\n4.0,5\n")
        with pytest.raises(ValueError, match=r"rows with missing values: \[2, 3\]"):
            load_csv(path, "y", ["x"])

    def test_non_numeric_outcome_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("y,x\nhigh,2\nlow,3\n")
        with pytest.raises(ValueError, match="not numeric"):
            load_csv(path, "y", ["x"])


class TestAnoesTable:
    def _data(self, memory_csv):
        return load_csv(memory_csv, "accuracy", ["group", "age", "gender"], "gaussian")

    def test_rows_match_direct_wald_pipeline(self, memory_csv):
        # table assembly adds no arithmetic on top of wald_stat + resi_point
        data, fmap = self._data(memory_csv)
        table = anoes_table(data, fmap, ci_method="chisq")
        fit = fit_ols(data)
        cov = cov_robust(fit)
        for row in table.rows:
            tested = row.columns
            w = wald_stat(fit, cov, tested=tested)
            assert row.chi2 == pytest.approx(w.t2, rel=1e-12)
            assert row.resi == pytest.approx(resi_point(w).s_hat, abs=1e-12)
            assert row.p_value == pytest.approx(chisq_sf(w.t2, w.m1), abs=1e-12)

    def test_chisq_ci_method_reproduces_inversion_bounds(self, memory_csv):
        data, fmap = self._data(memory_csv)
        table = anoes_table(data, fmap, ci_method="chisq")
        for row in table.rows:
            iv = ci_ncp_chisq(row.chi2, row.df, 0.05, data.n).to_resi()
            assert (row.ci_lower, row.ci_upper) == (iv.lower, iv.upper)

    def test_overall_and_residual_degrees_of_freedom(self, memory_csv):
        data, fmap = self._data(memory_csv)
        table = anoes_table(data, fmap, ci_method="chisq")
        overall = table.rows[-1]
        assert overall.name == "Overall"
        assert overall.df == data.m - 1
        assert table.residual_df == data.n - data.m

    def test_same_seed_identical_table(self, memory_csv):
        data, fmap = self._data(memory_csv)
        t1 = anoes_table(data, fmap, ci_method="nonparametric", replicates=150, seed=5)
        t2 = anoes_table(data, fmap, ci_method="nonparametric", replicates=150, seed=5)
        assert to_json_text(t1) == to_json_text(t2)

    def test_reduced_mode_two_row_shape(self, memory_csv):
        data, fmap = self._data(memory_csv)
        table = anoes_table(data, fmap, ci_method="chisq", reduced=["group"])
        assert [r.name for r in table.rows] == ["Tested"]
        assert table.rows[0].df == 2  # age + gender jointly
        assert table.residual_df == data.n - data.m
        direct = anoes_table(data, fmap, ci_method="chisq")
        joint = wald_stat(fit_ols(data), cov_robust(fit_ols(data)), tested=(2, 3))
        assert table.rows[0].chi2 == pytest.approx(joint.t2, rel=1e-12)

    def test_null_factor_truncates_to_zero_with_zero_lower_bound(self, tmp_path):
        rng = make_stream(9)
        n = 120
        x1 = rng.standard_normal(n)
        noise = rng.standard_normal(n)
        path = tmp_path / "d.csv"
        lines = ["y,x1"] + [f"{y:.6f},{x:.6f}" for y, x in zip(noise * 0.01 + 0.0 * x1, x1)]
        path.write_text("\n".join(lines) + "\n")
        data, fmap = load_csv(path, "y", ["x1"])
        table = anoes_table(data, fmap, ci_method="chisq")
        row = table.rows[0]
        if row.chi2 < row.df:
            assert row.resi == 0.0
        assert row.ci_lower == 0.0

    def test_unknown_reduced_factor_rejected(self, memory_csv):
        data, fmap = self._data(memory_csv)
        with pytest.raises(ValueError, match="not in the model"):
            anoes_table(data, fmap, ci_method="chisq", reduced=["iq"])

    def test_estimate_only_for_single_column_factors(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text(
            "y,dose\n" + "\n".join(f"{v},{d}" for v, d in zip(
                [1.0, 2.0, 3.0, 2.5, 1.5, 2.2, 1.8, 2.9], ["a", "b", "c", "b", "a", "c", "a", "b"]
            )) + "\n"
        )
        data, fmap = load_csv(path, "y", ["dose"])
        table = anoes_table(data, fmap, ci_method="chisq")
        assert table.rows[0].estimate is None  # two-column factor: joint test only
        assert table.rows[0].df == 2


class TestFormats:
    def test_text_layout(self, memory_csv):
        data, fmap = load_csv(memory_csv, "accuracy", ["group", "age", "gender"])
        text = to_text(anoes_table(data, fmap, ci_method="chisq"))
        lines = text.splitlines()
        assert lines[0].startswith("factor")
        assert "robust s.e." in lines[0]
        assert lines[-1].startswith("Residual")

    def test_csv_and_json_round_trip(self, memory_csv):
        data, fmap = load_csv(memory_csv, "accuracy", ["group", "age", "gender"])
        table = anoes_table(data, fmap, ci_method="chisq")
        csv_text = to_csv_text(table)
        assert csv_text.splitlines()[0].startswith("factor,estimate")
        payload = json.loads(to_json_text(table))
        assert payload["residual_df"] == table.residual_df
        assert len(payload["rows"]) == len(table.rows)


class TestCli:
    def test_ci_command(self):
        result = CliRunner().invoke(main, ["ci", "--t2", "18.92", "--m1", "1", "--n", "98", "--method", "chisq"])
        assert result.exit_code == 0
        assert "resi:" in result.output

    def test_anoes_command_text(self, memory_csv):
        result = CliRunner().invoke(main, [
            "anoes", "--data", str(memory_csv), "--outcome", "accuracy",
            "--factors", "group,age,gender", "--family", "binomial",
            "--ci", "chisq",
        ])
        assert result.exit_code == 0
        assert "Overall" in result.output

    def test_anoes_missing_file_fails_cleanly(self):
        result = CliRunner().invoke(main, [
            "anoes", "--data", "/nonexistent.csv", "--outcome", "y", "--factors", "x",
        ])
        assert result.exit_code != 0

    def test_anoes_bad_column_exit_code(self, memory_csv):
        result = CliRunner().invoke(main, [
            "anoes", "--data", str(memory_csv), "--outcome", "accuracy",
            "--factors", "group,bogus", "--ci", "chisq",
        ])
        assert result.exit_code == 1
        assert "missing columns" in result.output

    def test_sim_rejects_bad_grid(self, tmp_path):
        grid = tmp_path / "g.toml"
        grid.write_text('skedasticity = ["sideways"]\n')
        result = CliRunner().invoke(main, [
            "sim", "bias", "--grid", str(grid), "--sims", "5", "--seed", "1",
            "--out", str(tmp_path / "out"),
        ])
        assert result.exit_code == 1

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "resi", "ci", "--t2", "4.0", "--m1", "1", "--n", "50", "--method", "f"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "ncp:" in proc.stdout
