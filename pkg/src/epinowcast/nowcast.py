"""Log-log nowcasting models and the model-free series comparison.

A nowcast regresses ln(target) on ln(lagged predictor) plus a weekend dummy,
then back-transforms fitted values with a plain exp (no smearing correction)
to score accuracy on the original scale.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from . import ols
from .errors import MissingValue, NonPositiveValue
from .series import DailySeries, DateWindow, is_weekend, lag

MAX_LAG_DAYS = 30


@dataclass(frozen=True)
class NowcastSpec:
    """Declaration of one model: what predicts what, at which lag."""

    target: DailySeries
    predictor: DailySeries
    lag_days: int
    window: DateWindow
    weekend_dummy: bool = True

    def __post_init__(self) -> None:
        if not 0 <= self.lag_days <= MAX_LAG_DAYS:
            raise ValueError(f"lag_days must be in [0, {MAX_LAG_DAYS}], got {self.lag_days}")

    @property
    def predictor_column(self) -> str:
        return f"log_{self.predictor.source_name}"


@dataclass(frozen=True)
class NowcastModel:
    """A fitted nowcast plus its accuracy metrics.

    mae_log is the mean absolute residual on the log scale; mape_original is
    the mean absolute percentage error of exp(fitted) against the raw target
    over the same rows used to fit.
    """

    spec: NowcastSpec
    fit: ols.OlsFit
    mae_log: float
    mape_original: float
    weekend_effect: float | None


def build_design(spec: NowcastSpec) -> ols.DesignMatrix:
    """Design matrix over every date of the window.

    The lag reaches back into predictor history rather than shrinking the
    window, so n is the window length for any feasible lag. Raises
    MissingValue for an uncovered window date and NonPositiveValue where the
    log transform is undefined.
    """
    lagged = lag(spec.predictor, spec.lag_days)
    log_target, log_pred, weekend_col = [], [], []
    for d in spec.window.dates():
        tv = spec.target.get(d)
        if tv is None:
            raise MissingValue(d, spec.target.source_name)
        pv = lagged.get(d)
        if pv is None:
            raise MissingValue(d, lagged.source_name)
        if tv <= 0:
            raise NonPositiveValue(d, spec.target.source_name, tv)
        if pv <= 0:
            raise NonPositiveValue(d, lagged.source_name, pv)
        log_target.append(math.log(tv))
        log_pred.append(math.log(pv))
        weekend_col.append(1.0 if is_weekend(d) else 0.0)

    n = len(log_target)
    columns = [np.ones(n), np.array(log_pred)]
    names = ["intercept", spec.predictor_column]
    if spec.weekend_dummy:
        columns.append(np.array(weekend_col))
        names.append("weekend")
    return ols.DesignMatrix(
        column_names=tuple(names),
        x=np.column_stack(columns),
        y=np.array(log_target),
    )


def fit_nowcast(spec: NowcastSpec) -> NowcastModel:
    """Fit the model and populate log-scale and original-scale metrics."""
    design = build_design(spec)
    fit = ols.fit(design)
    target = np.exp(design.y)
    predictions = np.exp(fit.fitted)  # naive back-transform, no bias correction
    mae_log = float(np.mean(np.abs(fit.residuals)))
    mape = float(np.mean(np.abs(predictions - target) / target))
    effect = None
    if spec.weekend_dummy:
        effect = weekend_effect(fit.coefficients["weekend"])
    return NowcastModel(
        spec=spec, fit=fit, mae_log=mae_log, mape_original=mape, weekend_effect=effect
    )


def predict(model: NowcastModel, predictor_value: float, date: dt.date) -> float:
    """Predicted count for `date` given the predictor value observed
    lag_days earlier; for a lag-L model this is an L-day-ahead prediction."""
    if predictor_value <= 0:
        raise NonPositiveValue(date, model.spec.predictor.source_name, predictor_value)
    coef = model.fit.coefficients
    log_pred = coef["intercept"] + coef[model.spec.predictor_column] * math.log(
        predictor_value
    )
    if model.spec.weekend_dummy and is_weekend(date):
        log_pred += coef["weekend"]
    return math.exp(log_pred)


@dataclass(frozen=True)
class ComparisonRow:
    date: dt.date
    truth: float
    other: float
    signed_pct: float  # (other - truth) / truth


@dataclass(frozen=True)
class RawComparison:
    mape: float
    rows: tuple[ComparisonRow, ...]


def compare_raw(a: DailySeries, b: DailySeries, window: DateWindow) -> RawComparison:
    """Model-free comparison of b against a; a is the denominator (truth).

    mape = mean |b - a| / a over the window; per-date rows carry the signed
    percentage difference (b - a) / a.
    """
    rows = []
    for d in window.dates():
        av = a.get(d)
        if av is None:
            raise MissingValue(d, a.source_name)
        bv = b.get(d)
        if bv is None:
            raise MissingValue(d, b.source_name)
        if av <= 0:
            raise NonPositiveValue(d, a.source_name, av)
        rows.append(ComparisonRow(d, av, bv, (bv - av) / av))
    mape = sum(abs(r.signed_pct) for r in rows) / len(rows)
    return RawComparison(mape=mape, rows=tuple(rows))


def weekend_effect(beta_weekend: float) -> float:
    """Multiplicative weekend under/over-reporting: exp(beta) - 1."""
    return math.exp(beta_weekend) - 1.0


def to_report(model: NowcastModel) -> dict:
    """FitReport as a JSON-ready dict; key names are a stable contract."""
    spec = model.spec
    fit = model.fit
    coefficients = {
        name: {
            "estimate": fit.coefficients[name],
            "se": fit.standard_errors[name],
            "t": fit.t_stats[name],
            "p": fit.p_values[name],
            "stars": ols.stars(fit.p_values[name]),
        }
        for name in fit.column_names
    }
    return {
        "spec": {
            "target": spec.target.source_name,
            "predictor": spec.predictor.source_name,
            "lag_days": spec.lag_days,
            "weekend_dummy": spec.weekend_dummy,
            "window": {
                "from": spec.window.start.isoformat(),
                "to": spec.window.end.isoformat(),
            },
        },
        "coefficients": coefficients,
        "r2": fit.r_squared,
        "adj_r2": fit.adj_r_squared,
        "mae_log": model.mae_log,
        "mape_original": model.mape_original,
        "weekend_effect": model.weekend_effect,
        "f": {
            "value": fit.f_statistic,
            "df1": fit.f_df[0] if fit.f_df else None,
            "df2": fit.f_df[1] if fit.f_df else None,
        },
        "n": fit.n,
    }


def predict_from_report(report: dict, predictor_value: float, date: dt.date) -> float:
    """Prediction from a saved FitReport dict, without the fitted series."""
    if predictor_value <= 0:
        raise NonPositiveValue(date, report["spec"]["predictor"], predictor_value)
    coef = report["coefficients"]
    slope_name = next(
        name for name in coef if name not in ("intercept", "weekend")
    )
    log_pred = coef["intercept"]["estimate"] + coef[slope_name]["estimate"] * math.log(
        predictor_value
    )
    if "weekend" in coef and is_weekend(date):
        log_pred += coef["weekend"]["estimate"]
    return math.exp(log_pred)
