"""A reduced run of the simulation studies.

Reproduces the qualitative findings at desk scale: the model-based estimator's
bias under heteroskedasticity, the chi-squared interval's undercoverage once
the covariance is estimated, and the statistic-variance ordering.  Writes the
three study CSVs (the input format of the resi-figures renderer) into
demo_output/.
"""

from pathlib import Path

from resi import (
    make_scenario,
    run_bias_study,
    run_coverage_study,
    run_variance_study,
    write_study_csv,
)

out = Path("demo_output")
out.mkdir(exist_ok=True)
SIMS = 300  # desk scale; the acceptance suite runs the full sizes

print("== bias (n = 500, S = 1) ==")
grid = [make_scenario(500, 1.0), make_scenario(500, 1.0, skedasticity="hetero")]
bias = run_bias_study(grid, SIMS, seed=1)
for r in bias:
    print(
        f"  {r.scenario.skedasticity:6s} {r.estimator:10s} "
        f"mean S-hat = {r.mean_s_hat:.3f}  bias = {r.bias:+.3f}"
    )
write_study_csv(out / "bias.csv", "bias", bias)

print("\n== coverage of 95% intervals (n = 500, S = 1, homoskedastic) ==")
cov = run_coverage_study([make_scenario(500, 1.0)], SIMS, ["chisq", "f"], seed=2,
                         estimators=("oracle", "parametric"))
for r in cov:
    print(f"  {r.estimator:10s} {r.ci_method:5s} coverage = {r.coverage:.3f} (se {r.coverage_se:.3f})")
write_study_csv(out / "coverage.csv", "coverage", cov)

print("\n== Var(T^2) vs theory (fixed covariate, S = 1) ==")
var = run_variance_study([100, 500], 1.0, "fixed", 2000, seed=3)
for r in var:
    theory = f"theory = {r.var_theory:9.1f}" if r.var_theory is not None else "(no reference line)"
    print(f"  n={r.scenario.n:3d} {r.estimator:10s} simulated = {r.var_t2:9.1f}  {theory}")
write_study_csv(out / "variance.csv", "variance", var)

print(f"\nCSVs in {out}/; render with e.g.")
print("  resi-figures --study coverage --in demo_output/coverage.csv --out coverage.svg")
