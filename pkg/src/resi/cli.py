"""Command line interface: effect size tables, NCP intervals, and the
simulation studies.

    resi anoes --data file.csv --outcome y --factors a,b,c --family gaussian
    resi ci --t2 18.92 --m1 1 --n 98 --method chisq
    resi sim bias --grid grid.toml --sims 1000 --seed 7 --out results/

Grid config files are TOML; see the README for the recognized keys.
"""

from __future__ import annotations

from pathlib import Path

import click

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import anoes as anoes_mod
from . import simharness as sh
from .ci import ci_ncp_chisq, ci_ncp_f
from .errors import ResiError


def _fail(exc: Exception) -> "click.ClickException":
    return click.ClickException(str(exc))


@click.group()
def main():
    """Robust effect size index estimation and inference."""


@main.command("anoes")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--outcome", required=True)
@click.option("--factors", required=True, help="comma-separated factor column names")
@click.option("--family", type=click.Choice(["gaussian", "binomial"]), default="gaussian")
@click.option("--reduced", default=None, help="comma-separated factors of a reduced model")
@click.option("--cov", "cov_kind", type=click.Choice(["robust", "model"]), default="robust")
@click.option("--ci", "ci_method", default="nonparametric",
              help="chisq | f | nonparametric | wild:<scheme>:<multiplier>")
@click.option("--boot", "replicates", type=int, default=1000)
@click.option("--alpha", type=float, default=0.05)
@click.option("--seed", type=int, default=0)
@click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]), default="text")
def anoes_cmd(data_path, outcome, factors, family, reduced, cov_kind, ci_method,
              replicates, alpha, seed, fmt):
    """Per-factor effect sizes with CIs from a CSV dataset."""
    try:
        data, factor_map = anoes_mod.load_csv(data_path, outcome, factors.split(","), family)
        table = anoes_mod.anoes_table(
            data,
            factor_map,
            family=family,
            cov_kind=cov_kind,
            ci_method=ci_method,
            replicates=replicates,
            alpha=alpha,
            seed=seed,
            reduced=reduced.split(",") if reduced else None,
        )
    except (ResiError, ValueError, OSError) as exc:
        raise _fail(exc)
    render = {"text": anoes_mod.to_text, "csv": anoes_mod.to_csv_text, "json": anoes_mod.to_json_text}
    click.echo(render[fmt](table), nl=False)


@main.command("ci")
@click.option("--t2", type=float, required=True)
@click.option("--m1", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--df2", type=int, default=None, help="denominator df (default n - m1 - 1)")
@click.option("--method", type=click.Choice(["chisq", "f"]), required=True)
@click.option("--alpha", type=float, default=0.05)
def ci_cmd(t2, m1, n, df2, method, alpha):
    """NCP-inversion confidence interval for an observed statistic."""
    try:
        if method == "chisq":
            iv = ci_ncp_chisq(t2, m1, alpha, n)
        else:
            iv = ci_ncp_f(t2, m1, df2 if df2 is not None else n - m1 - 1, alpha, n)
    except (ResiError, ValueError) as exc:
        raise _fail(exc)
    r = iv.to_resi()
    click.echo(f"ncp:  [{iv.lower:.6f}, {iv.upper:.6f}]")
    click.echo(f"resi: [{r.lower:.6f}, {r.upper:.6f}]")


@main.group("sim")
def sim_group():
    """Monte Carlo studies writing long-format CSV."""


def _load_grid_config(path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _common_sim_options(fn):
    for deco in (
        click.option("--grid", "grid_path", required=True, type=click.Path(exists=True, dir_okay=False)),
        click.option("--sims", type=int, default=1000),
        click.option("--seed", type=int, default=0),
        click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False)),
        click.option("--workers", type=int, default=1),
    ):
        fn = deco(fn)
    return fn


@sim_group.command("bias")
@_common_sim_options
def sim_bias(grid_path, sims, seed, out_dir, workers):
    """Estimator bias over a scenario grid."""
    try:
        config = _load_grid_config(grid_path)
        grid = sh.build_grid(config)
        estimators = tuple(config.get("estimators", sh.ESTIMATORS))
        results = sh.run_bias_study(grid, sims, seed, estimators=estimators, workers=workers)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        sh.write_study_csv(out / "bias.csv", "bias", results)
    except (ResiError, ValueError, OSError) as exc:
        raise _fail(exc)
    click.echo(f"wrote {out / 'bias.csv'}")


@sim_group.command("coverage")
@_common_sim_options
def sim_coverage(grid_path, sims, seed, out_dir, workers):
    """CI coverage over a scenario grid."""
    try:
        config = _load_grid_config(grid_path)
        grid = sh.build_grid(config)
        estimators = tuple(config.get("estimators", sh.ESTIMATORS))
        methods = list(config.get("ci_methods", ["chisq", "f"]))
        boot_r = int(config.get("boot_replicates", 1000))
        alpha = float(config.get("alpha", 0.05))
        results = sh.run_coverage_study(
            grid, sims, methods, seed,
            estimators=estimators, boot_replicates=boot_r, workers=workers, alpha=alpha,
        )
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        sh.write_study_csv(out / "coverage.csv", "coverage", results)
    except (ResiError, ValueError, OSError) as exc:
        raise _fail(exc)
    click.echo(f"wrote {out / 'coverage.csv'}")


@sim_group.command("variance")
@_common_sim_options
def sim_variance(grid_path, sims, seed, out_dir, workers):
    """Test statistic variance vs the chi-squared / F theory lines."""
    try:
        config = _load_grid_config(grid_path)
        ns = config.get("n", [50, 100, 250, 500])
        ns = list(ns) if isinstance(ns, (list, tuple)) else [ns]
        results = sh.run_variance_study(
            [int(n) for n in ns],
            float(config.get("s", 1.0)),
            str(config.get("covariate", "fixed")),
            sims,
            seed,
            estimators=tuple(config.get("estimators", sh.ESTIMATORS)),
            workers=workers,
            family=str(config.get("family", "normal")),
            skedasticity=str(config.get("skedasticity", "homo")),
        )
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        sh.write_study_csv(out / "variance.csv", "variance", results)
    except (ResiError, ValueError, OSError) as exc:
        raise _fail(exc)
    click.echo(f"wrote {out / 'variance.csv'}")


if __name__ == "__main__":
    main()
