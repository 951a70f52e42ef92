"""Turn price series into batches of return paths.

Pipeline: load and clean a price table, compute returns, cut them into
non-overlapping windows, split the windows into calibration and test
sets, and lift each window to a path (cumulative returns by default,
starting at zero on a unit time grid).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import ConfigError, DataError
from .paths import Path

RETURN_KINDS = ("log", "simple")
SPLIT_METHODS = ("chronological", "random")


@dataclass(frozen=True)
class PriceSchema:
    """Column layout of a price table; one channel per price column."""

    date_column: str = "date"
    price_columns: tuple[str, ...] = ("price",)

    def __post_init__(self):
        if isinstance(self.price_columns, str):
            object.__setattr__(self, "price_columns", (self.price_columns,))
        if not self.price_columns:
            raise ConfigError("at least one price column is required")


@dataclass
class DropReport:
    n_rows: int
    n_kept: int
    n_bad_values: int
    n_duplicate_dates: int

    @property
    def fraction_dropped(self) -> float:
        return 0.0 if self.n_rows == 0 else 1.0 - self.n_kept / self.n_rows


def load_prices(source, schema: PriceSchema | None = None,
                max_drop_fraction: float = 0.05) -> tuple[pd.DataFrame, DropReport]:
    """Read, clean, and chronologically sort a price table.

    Rows with unparseable dates or non-numeric/missing prices are dropped,
    as are later rows repeating a date. Raises DataError when the dropped
    fraction exceeds max_drop_fraction or fewer than two rows survive.
    """
    schema = schema or PriceSchema()
    df = source.copy() if isinstance(source, pd.DataFrame) else pd.read_csv(source)
    missing = [c for c in (schema.date_column, *schema.price_columns)
               if c not in df.columns]
    if missing:
        raise DataError(f"price table is missing columns {missing}")

    dates = pd.to_datetime(df[schema.date_column], errors="coerce")
    prices = df[list(schema.price_columns)].apply(pd.to_numeric, errors="coerce")
    good = dates.notna() & prices.notna().all(axis=1)
    n_bad = int((~good).sum())

    clean = pd.DataFrame({schema.date_column: dates[good]})
    for c in schema.price_columns:
        clean[c] = prices.loc[good, c].astype(float)
    clean = clean.sort_values(schema.date_column, kind="stable")
    dup = clean[schema.date_column].duplicated(keep="first")
    n_dup = int(dup.sum())
    clean = clean[~dup].reset_index(drop=True)

    report = DropReport(n_rows=len(df), n_kept=len(clean),
                        n_bad_values=n_bad, n_duplicate_dates=n_dup)
    if report.fraction_dropped > max_drop_fraction:
        raise DataError(
            f"dropped {report.fraction_dropped:.1%} of rows, "
            f"above the {max_drop_fraction:.1%} threshold")
    if len(clean) < 2:
        raise DataError("need at least two clean price rows")
    return clean, report


def to_returns(prices, schema: PriceSchema | None = None,
               kind: str = "log") -> np.ndarray:
    """Per-step returns, shape (T-1, d). Prices must be strictly positive."""
    if kind not in RETURN_KINDS:
        raise ConfigError(f"unknown return kind {kind!r}")
    if isinstance(prices, pd.DataFrame):
        schema = schema or PriceSchema()
        values = prices[list(schema.price_columns)].to_numpy(dtype=float)
    else:
        values = np.atleast_2d(np.asarray(prices, dtype=float).T).T
    if values.shape[0] < 2:
        raise DataError("need at least two prices to form returns")
    if np.any(values <= 0.0) or not np.all(np.isfinite(values)):
        bad = int(np.argwhere((values <= 0.0) | ~np.isfinite(values))[0, 0])
        raise DataError(f"nonpositive or non-finite price at row {bad}")
    if kind == "log":
        return np.diff(np.log(values), axis=0)
    return values[1:] / values[:-1] - 1.0


def make_windows(returns: np.ndarray, window: int) -> np.ndarray:
    """Cut a return series into non-overlapping windows, shape (n, W, d).

    The remainder at the end of the series is dropped; a series shorter
    than one window raises DataError.
    """
    if window < 1:
        raise ConfigError("window length must be at least 1")
    r = np.asarray(returns, dtype=float)
    if r.ndim == 1:
        r = r[:, None]
    n = r.shape[0] // window
    if n == 0:
        raise DataError(
            f"series of {r.shape[0]} returns is shorter than one "
            f"window of {window}")
    return r[:n * window].reshape(n, window, r.shape[1])


@dataclass
class ReturnWindowSet:
    """A batch of return windows plus how to lift them to paths."""

    windows: np.ndarray
    columns: tuple[str, ...] = ("price",)
    kind: str = "log"

    def __post_init__(self):
        self.windows = np.asarray(self.windows, dtype=float)
        if self.windows.ndim == 2:
            self.windows = self.windows[:, :, None]
        if self.windows.ndim != 3:
            raise DataError("windows must have shape (n, W, d)")

    @property
    def n_windows(self) -> int:
        return self.windows.shape[0]

    @property
    def window(self) -> int:
        return self.windows.shape[1]

    def to_paths(self, cumulative: bool = True) -> list[Path]:
        """One path per window: cumulative returns from zero on [0, 1]
        (W+1 points), or the raw return sequence (W points)."""
        n, w, d = self.windows.shape
        if cumulative:
            times = np.linspace(0.0, 1.0, w + 1)
            return [Path(times, np.vstack([np.zeros(d), np.cumsum(win, axis=0)]))
                    for win in self.windows]
        if w < 2:
            raise DataError("raw return paths need windows of at least 2")
        times = np.linspace(0.0, 1.0, w)
        return [Path(times, win) for win in self.windows]


def split_windows(window_set: ReturnWindowSet, ratio: float = 0.5,
                  method: str = "chronological",
                  seed: int = 0) -> tuple[ReturnWindowSet, ReturnWindowSet]:
    """Split into (calibration, test); ratio is the calibration fraction.

    Chronological keeps the earliest windows for calibration; random
    permutes windows with the given seed first.
    """
    if method not in SPLIT_METHODS:
        raise ConfigError(f"unknown split method {method!r}")
    n = window_set.n_windows
    k = int(n * ratio)
    if not 1 <= k < n:
        raise DataError(
            f"ratio {ratio} leaves an empty side when splitting {n} windows")
    order = np.arange(n)
    if method == "random":
        order = np.random.default_rng(np.random.SeedSequence(seed)).permutation(n)
    first, second = order[:k], order[k:]
    mk = lambda idx: ReturnWindowSet(window_set.windows[idx],
                                     window_set.columns, window_set.kind)
    return mk(first), mk(second)


@dataclass
class IngestResult:
    calibration: ReturnWindowSet
    test: ReturnWindowSet
    report: DropReport


def ingest_prices(source, schema: PriceSchema | None = None, window: int = 30,
                  ratio: float = 0.5, method: str = "chronological",
                  seed: int = 0, kind: str = "log",
                  max_drop_fraction: float = 0.05) -> IngestResult:
    """Full pipeline from a price table to calibration/test window sets."""
    schema = schema or PriceSchema()
    prices, report = load_prices(source, schema, max_drop_fraction)
    returns = to_returns(prices, schema, kind)
    windows = ReturnWindowSet(make_windows(returns, window),
                              schema.price_columns, kind)
    cal, test = split_windows(windows, ratio, method, seed)
    return IngestResult(calibration=cal, test=test, report=report)
