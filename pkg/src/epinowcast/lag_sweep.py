"""Lag selection: fit the nowcast at every lag in [0, max_lag] and pick the best.

The dependent window is held fixed across lags (lags reach further back into
predictor history), so adjusted R-squared values are directly comparable.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .errors import EpiNowcastError, NoFeasibleLag
from .nowcast import NowcastSpec, fit_nowcast
from .series import DailySeries, DateWindow

SELECTION_RULES = ("max_adj_r2", "min_mae", "combined")
TIE_EPS = 1e-12  # ties within this margin go to the smaller lag

DEFAULT_METRICS = ("adj_r_squared", "mae_log", "mape_original", "r_squared")


@dataclass(frozen=True)
class LagEntry:
    """Metrics for one lag; `reason` is set instead when the lag is infeasible."""

    lag: int
    r_squared: float | None = None
    adj_r_squared: float | None = None
    mae_log: float | None = None
    mape_original: float | None = None
    reason: str | None = None

    @property
    def feasible(self) -> bool:
        return self.reason is None

    def metric(self, name: str) -> float | None:
        if name not in DEFAULT_METRICS:
            raise ValueError(f"unknown metric {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class LagSweepResult:
    predictor_name: str
    entries: tuple[LagEntry, ...]
    selection_rule: str
    selected_lag: int
    best_adj_r2_lag: int
    best_mae_lag: int

    @property
    def rules_disagree(self) -> bool:
        return self.best_adj_r2_lag != self.best_mae_lag


def _argbest(entries: list[LagEntry], metric: str, maximize: bool) -> int:
    best = None
    best_lag = None
    for e in entries:
        v = e.metric(metric)
        if v is None:
            continue
        better = best is None or (v > best + TIE_EPS if maximize else v < best - TIE_EPS)
        if better:
            best, best_lag = v, e.lag
    assert best_lag is not None
    return best_lag


def sweep(
    target: DailySeries,
    predictor: DailySeries,
    window: DateWindow,
    max_lag: int = 10,
    rule: str = "combined",
) -> LagSweepResult:
    """Fit at every lag 0..max_lag over a fixed window and select one.

    Infeasible lags (missing or non-positive values after lagging) are
    recorded with a reason rather than dropped. `max_adj_r2` picks the
    highest adjusted R-squared, `min_mae` the lowest log-scale MAE, and
    `combined` picks by adjusted R-squared while exposing the MAE choice for
    disagreement reporting. Ties go to the smaller lag.
    """
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    if rule not in SELECTION_RULES:
        raise ValueError(f"rule must be one of {SELECTION_RULES}, got {rule!r}")

    entries = []
    for k in range(max_lag + 1):
        try:
            model = fit_nowcast(NowcastSpec(target, predictor, k, window))
        except EpiNowcastError as err:
            entries.append(LagEntry(lag=k, reason=f"{type(err).__name__}: {err}"))
            continue
        entries.append(
            LagEntry(
                lag=k,
                r_squared=model.fit.r_squared,
                adj_r_squared=model.fit.adj_r_squared,
                mae_log=model.mae_log,
                mape_original=model.mape_original,
            )
        )

    if not any(e.feasible for e in entries):
        raise NoFeasibleLag(
            f"no lag in 0..{max_lag} yields a valid design for "
            f"{predictor.source_name} -> {target.source_name}"
        )

    best_adj = _argbest(entries, "adj_r_squared", maximize=True)
    best_mae = _argbest(entries, "mae_log", maximize=False)
    selected = best_mae if rule == "min_mae" else best_adj
    return LagSweepResult(
        predictor_name=predictor.source_name,
        entries=tuple(entries),
        selection_rule=rule,
        selected_lag=selected,
        best_adj_r2_lag=best_adj,
        best_mae_lag=best_mae,
    )


def emit_sweep_table(
    result: LagSweepResult, metrics: tuple[str, ...] = DEFAULT_METRICS
) -> list[tuple[str, int, str, float | str | None]]:
    """Tidy (predictor, lag, metric, value) rows for external plotting.

    Rows are ordered by lag ascending then metric name ascending. Infeasible
    lags emit their metric rows with value None plus a `reason` row carrying
    the explanation, so downstream plots see the gap rather than a hole.
    """
    rows: list[tuple[str, int, str, float | str | None]] = []
    for e in result.entries:
        names = sorted(metrics if e.feasible else (*metrics, "reason"))
        for name in names:
            value = e.reason if name == "reason" else e.metric(name)
            rows.append((result.predictor_name, e.lag, name, value))
    return rows


def sweep_table_to_csv(rows: list[tuple[str, int, str, float | str | None]]) -> str:
    """CSV with header predictor,lag,metric,value; floats at 6 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["predictor", "lag", "metric", "value"])
    for predictor, lag_days, metric, value in rows:
        if value is None:
            text = ""
        elif isinstance(value, str):
            text = value
        else:
            text = format(value, ".6g")
        writer.writerow([predictor, lag_days, metric, text])
    return buf.getvalue()


def parse_sweep_csv(text: str) -> list[tuple[str, int, str, float | str | None]]:
    """Inverse of sweep_table_to_csv (values parse back to float where numeric)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != ["predictor", "lag", "metric", "value"]:
        raise ValueError(f"unexpected sweep CSV header: {header!r}")
    rows: list[tuple[str, int, str, float | str | None]] = []
    for predictor, lag_days, metric, raw in reader:
        value: float | str | None
        if raw == "":
            value = None
        elif metric == "reason":
            value = raw
        else:
            value = float(raw)
        rows.append((predictor, int(lag_days), metric, value))
    return rows
