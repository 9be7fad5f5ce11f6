"""Analysis of effect sizes: CSV ingestion and ANOVA-style summary tables.

Each named factor gets a joint Wald test over its design columns (multi-level
categoricals expand to indicator columns that are tested together), a p-value
from the central chi-squared survival function, the effect size index, and a
confidence interval.  An overall row tests all non-intercept columns jointly;
a reduced-model mode instead tests the columns the reduced model omits.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .ci import ci_ncp_chisq, ci_ncp_f, parse_ci_method, percentile_bounds, resample
from .errors import BootstrapFailureError, ResiError
from .linmodels import Dataset, cov_model, cov_robust, fit_glm_binomial, fit_ols
from .special import chisq_sf
from .wald import resi_point, wald_stat

_MISSING = {"", "na", "nan", "null", "none"}


@dataclass(frozen=True)
class FactorRow:
    name: str
    columns: tuple[int, ...]
    chi2: float
    df: int
    p_value: float
    resi: float
    ci_lower: float | None = None
    ci_upper: float | None = None
    estimate: float | None = None  # single-column factors only
    se: float | None = None


@dataclass(frozen=True)
class AnoesTable:
    rows: tuple[FactorRow, ...]
    residual_df: int
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def load_csv(path, outcome: str, factors, family: str = "gaussian"):
    """Read a CSV into a Dataset plus the factor -> design-column map.

    Categorical factor columns expand into indicator columns against the
    first (sorted) level; an intercept column is prepended.  Rows with
    missing values in any used column are rejected, naming the offending
    data rows (1-based, excluding the header).
    """
    factors = list(factors)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        records = [row for row in reader if row]

    if len(set(header)) != len(header):
        dupes = sorted({c for c in header if header.count(c) > 1})
        raise ValueError(f"duplicate column names: {', '.join(dupes)}")
    missing_cols = [c for c in [outcome, *factors] if c not in header]
    if missing_cols:
        raise ValueError(f"missing columns: {', '.join(missing_cols)}")
    col_idx = {c: header.index(c) for c in [outcome, *factors]}

    bad_rows = []
    for i, row in enumerate(records):
        if len(row) != len(header) or any(
            row[col_idx[c]].strip().lower() in _MISSING for c in col_idx
        ):
            bad_rows.append(i + 1)
    if bad_rows:
        raise ValueError(f"rows with missing values: {bad_rows}")
    if not records:
        raise ValueError(f"{path}: no data rows")

    y_raw = [row[col_idx[outcome]].strip() for row in records]
    if not all(_is_number(v) for v in y_raw):
        raise ValueError(f"outcome column {outcome!r} is not numeric")
    y = np.array([float(v) for v in y_raw])

    n = len(records)
    columns = [np.ones(n)]
    factor_map: dict[str, tuple[int, ...]] = {}
    for name in factors:
        raw = [row[col_idx[name]].strip() for row in records]
        if all(_is_number(v) for v in raw):
            factor_map[name] = (len(columns),)
            columns.append(np.array([float(v) for v in raw]))
        else:
            levels = sorted(set(raw))
            idx = []
            for level in levels[1:]:  # first level is the reference
                idx.append(len(columns))
                columns.append(np.array([1.0 if v == level else 0.0 for v in raw]))
            factor_map[name] = tuple(idx)

    X = np.column_stack(columns)
    tested = tuple(j for j in range(1, X.shape[1]))
    data = Dataset(y, X, tested=tested, nuisance=(0,))
    if family not in ("gaussian", "binomial"):
        raise ValueError(f"family must be 'gaussian' or 'binomial', got {family!r}")
    return data, factor_map


# ---------------------------------------------------------------------------
# table construction
# ---------------------------------------------------------------------------


def _bootstrap_rows(data, family, tested_sets, cov_kind, spec):
    """Per-replicate effect sizes for several tested column sets at once.

    One resampling pass feeds every row of the table, so all CIs come from
    the same replicates.
    """
    fit_fn = fit_ols if family == "gaussian" else fit_glm_binomial
    cov_fn = cov_robust if cov_kind == "robust" else cov_model
    base = fit_fn(data)
    values = {key: [] for key in tested_sets}
    failures = 0
    for b in range(spec.replicates):
        ds = resample(data, base, spec, replicate_index=b)
        try:
            refit = fit_fn(ds)
            cov = cov_fn(refit)
            for key, cols in tested_sets.items():
                values[key].append(resi_point(wald_stat(refit, cov, tested=cols)).s_hat)
        except (ResiError, ValueError, np.linalg.LinAlgError):
            failures += 1
    if failures > 0.01 * spec.replicates:
        raise BootstrapFailureError(failures, spec.replicates)
    return {key: np.asarray(v) for key, v in values.items()}


def anoes_table(
    data: Dataset,
    factor_map: dict[str, tuple[int, ...]],
    family: str = "gaussian",
    cov_kind: str = "robust",
    ci_method: str = "nonparametric",
    replicates: int = 1000,
    alpha: float = 0.05,
    seed=0,
    reduced=None,
) -> AnoesTable:
    """Effect size table for a fitted model.

    ``reduced`` names the factors of a reduced model; when given, the output
    is the two-row comparison table (joint test of the omitted factors).
    """
    fit = fit_ols(data) if family == "gaussian" else fit_glm_binomial(data)
    cov = cov_robust(fit) if cov_kind == "robust" else cov_model(fit)
    n, m = data.n, data.m

    if reduced is not None:
        unknown = [f for f in reduced if f not in factor_map]
        if unknown:
            raise ValueError(f"reduced factors not in the model: {', '.join(unknown)}")
        tested_sets = {"Tested": tuple(
            j for f, cols in factor_map.items() if f not in reduced for j in cols
        )}
        if not tested_sets["Tested"]:
            raise ValueError("reduced model omits nothing: no columns to test")
    else:
        tested_sets = {name: cols for name, cols in factor_map.items()}
        tested_sets["Overall"] = tuple(j for j in range(1, m))

    boot_spec = parse_ci_method(ci_method, replicates, seed)
    boot_values = (
        _bootstrap_rows(data, family, tested_sets, cov_kind, boot_spec) if boot_spec else None
    )

    rows = []
    for name, cols in tested_sets.items():
        w = wald_stat(fit, cov, tested=cols)
        s_hat = resi_point(w).s_hat
        if boot_values is not None:
            lo, hi = percentile_bounds(boot_values[name], alpha)
        elif ci_method == "chisq":
            iv = ci_ncp_chisq(w.t2, w.m1, alpha, n).to_resi()
            lo, hi = iv.lower, iv.upper
        else:
            iv = ci_ncp_f(w.t2, w.m1, n - m, alpha, n).to_resi()
            lo, hi = iv.lower, iv.upper
        estimate = se = None
        if len(cols) == 1 and name not in ("Overall", "Tested"):
            j = cols[0]
            estimate = float(fit.coefficients[j])
            se = math.sqrt(cov.matrix[j, j] / n)
        rows.append(
            FactorRow(
                name=name,
                columns=cols,
                chi2=w.t2,
                df=w.m1,
                p_value=chisq_sf(w.t2, w.m1),
                resi=s_hat,
                ci_lower=lo,
                ci_upper=hi,
                estimate=estimate,
                se=se,
            )
        )

    meta = {
        "family": family,
        "cov": cov_kind,
        "ci_method": ci_method,
        "replicates": replicates if boot_spec else None,
        "alpha": alpha,
        "seed": seed if boot_spec else None,
        "n": n,
        "reduced": list(reduced) if reduced is not None else None,
    }
    return AnoesTable(rows=tuple(rows), residual_df=n - m, meta=meta)


# ---------------------------------------------------------------------------
# output formats
# ---------------------------------------------------------------------------


def _fmt(value, digits=2, width=0):
    if value is None:
        return "".rjust(width)
    return f"{value:.{digits}f}".rjust(width)


def _fmt_p(p: float) -> str:
    return "<0.001" if p < 0.001 else f"{p:.3f}"


def to_text(table: AnoesTable) -> str:
    se_label = "robust s.e." if table.meta.get("cov") == "robust" else "s.e."
    level = 100 * (1 - table.meta.get("alpha", 0.05))
    headers = ["factor", "estimate", se_label, "chi-squared", "d.f.", "p-value", "RESI", f"{level:g}% CI"]
    body = []
    for row in table.rows:
        ci = f"({row.ci_lower:.2f}, {row.ci_upper:.2f})" if row.ci_lower is not None else ""
        body.append([
            row.name,
            _fmt(row.estimate),
            _fmt(row.se),
            f"{row.chi2:.2f}",
            str(row.df),
            _fmt_p(row.p_value),
            f"{row.resi:.2f}",
            ci,
        ])
    body.append(["Residual", "", "", "", str(table.residual_df), "", "", ""])
    widths = [max(len(headers[j]), *(len(r[j]) for r in body)) for j in range(len(headers))]
    lines = ["  ".join(h.ljust(widths[j]) for j, h in enumerate(headers)).rstrip()]
    for r in body:
        lines.append("  ".join(v.ljust(widths[j]) for j, v in enumerate(r)).rstrip())
    return "\n".join(lines) + "\n"


def to_csv_text(table: AnoesTable) -> str:
    lines = ["factor,estimate,se,chi_squared,df,p_value,resi,ci_lower,ci_upper"]
    for row in table.rows:
        fields = [
            row.name,
            "" if row.estimate is None else repr(row.estimate),
            "" if row.se is None else repr(row.se),
            repr(row.chi2),
            str(row.df),
            repr(row.p_value),
            repr(row.resi),
            "" if row.ci_lower is None else repr(row.ci_lower),
            "" if row.ci_upper is None else repr(row.ci_upper),
        ]
        lines.append(",".join(fields))
    lines.append(f"Residual,,,,{table.residual_df},,,,")
    return "\n".join(lines) + "\n"


def to_json_text(table: AnoesTable) -> str:
    payload = {
        "meta": table.meta,
        "rows": [
            {
                "factor": row.name,
                "estimate": row.estimate,
                "se": row.se,
                "chi_squared": row.chi2,
                "df": row.df,
                "p_value": row.p_value,
                "resi": row.resi,
                "ci_lower": row.ci_lower,
                "ci_upper": row.ci_upper,
            }
            for row in table.rows
        ],
        "residual_df": table.residual_df,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
