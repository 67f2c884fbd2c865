"""Test-problem catalog and CSV ingestion for exponential-fit problems."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import CompositeProblem, SmoothMap
from .functions import BoxIndicator, L1Norm, L2Norm, ScalarIdentity, WeightedL1, Zero
from .trustregion import LipschitzData

__all__ = [
    "CatalogEntry",
    "Dataset",
    "DatasetError",
    "load_catalog",
    "get_entry",
    "load_csv_dataset",
    "synthetic_exp_dataset",
    "make_exp_residual_map",
    "exp_fit_problem",
]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    problem: CompositeProblem
    x0: np.ndarray
    known_optimum: tuple | None = None  # (x*, f*, provenance)
    lipschitz: LipschitzData | None = None


@dataclass(frozen=True)
class Dataset:
    t: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.t.shape != self.y.shape or self.t.ndim != 1:
            raise ValueError("dataset columns must be 1-D and of equal length")
        if self.t.size < 1:
            raise ValueError("dataset must have at least one row")
        if not (np.all(np.isfinite(self.t)) and np.all(np.isfinite(self.y))):
            raise ValueError("dataset entries must be finite")

    @property
    def count(self) -> int:
        return int(self.t.size)


class DatasetError(ValueError):
    pass


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv_dataset(path) -> Dataset:
    """Read two numeric columns; a single non-numeric header line is skipped."""
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"{path}: no such file")
    rows_t, rows_y = [], []
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise DatasetError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                t, y = float(row[0]), float(row[1])
            except ValueError:
                if lineno == 1 and not any(_is_number(c) for c in row):
                    continue
                raise DatasetError(f"{path}:{lineno}: non-numeric cell in {row!r}") from None
            if not (math.isfinite(t) and math.isfinite(y)):
                raise DatasetError(f"{path}:{lineno}: non-finite value")
            rows_t.append(t)
            rows_y.append(y)
    if not rows_t:
        raise DatasetError(f"{path}: no data rows")
    return Dataset(np.array(rows_t), np.array(rows_y))


def synthetic_exp_dataset(
    n_points=40, amplitude=2.0, rate=-1.3, noise=0.01, outlier_fraction=0.15, seed=0
) -> Dataset:
    """Samples of ``amplitude * exp(rate * t)`` on [0, 2] with gross outliers."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 2.0, n_points)
    y = amplitude * np.exp(rate * t) + noise * rng.standard_normal(n_points)
    n_out = int(round(outlier_fraction * n_points))
    idx = rng.choice(n_points, size=n_out, replace=False)
    y[idx] += rng.uniform(0.5, 1.5, size=n_out) * rng.choice([-1.0, 1.0], size=n_out)
    return Dataset(t, y)


def make_exp_residual_map(data: Dataset) -> SmoothMap:
    """Residuals ``c_i(x) = x1 * exp(x2 * t_i) - y_i``."""
    if data.count < 1:
        raise ValueError("empty dataset")
    t, y = data.t.copy(), data.y.copy()

    def ev(x):
        return x[0] * np.exp(x[1] * t) - y

    def jac(x):
        e = np.exp(x[1] * t)
        return np.column_stack([e, x[0] * t * e])

    return SmoothMap(2, t.size, ev, jac)


def exp_fit_problem(data: Dataset, lam=0.01, name="l1_reg_exp_fit") -> CompositeProblem:
    return CompositeProblem(make_exp_residual_map(data), L1Norm(), WeightedL1(lam), name)


def _rosenbrock_map():
    return SmoothMap(
        2,
        2,
        lambda x: np.array([10.0 * (x[1] - x[0] ** 2), 1.0 - x[0]]),
        lambda x: np.array([[-20.0 * x[0], 10.0], [-1.0, 0.0]]),
    )


def _quadratic_map(a):
    a = np.asarray(a, dtype=float)
    return SmoothMap(
        a.size,
        1,
        lambda x: np.array([0.5 * float((x - a) @ (x - a))]),
        lambda x: (x - a).reshape(1, -1),
    )


def load_catalog(seed: int = 0) -> list[CatalogEntry]:
    """All catalog problems. ``seed`` drives the synthetic fitting data."""
    entries = []

    entries.append(CatalogEntry(
        "rosenbrock_l1",
        CompositeProblem(_rosenbrock_map(), L1Norm(), Zero(), "rosenbrock_l1"),
        np.array([-1.2, 1.0]),
        (np.array([1.0, 1.0]), 0.0, "residuals vanish at (1, 1)"),
    ))

    a = np.zeros(2)
    entries.append(CatalogEntry(
        "smooth_quadratic",
        CompositeProblem(_quadratic_map(a), ScalarIdentity(), Zero(), "smooth_quadratic"),
        np.array([1.0, 0.0]),
        (a.copy(), 0.0, "c(x) = 0.5|x - a|^2 vanishes at a"),
    ))

    data = synthetic_exp_dataset(seed=seed)
    entries.append(CatalogEntry("l1_reg_exp_fit", exp_fit_problem(data), np.array([1.0, 0.0])))

    # residuals vanish at (1, 1) and (-1, -1); the box keeps only (1, 1)
    box_map = SmoothMap(
        2,
        2,
        lambda x: np.array([x[0] ** 2 + x[1] ** 2 - 2.0, x[0] - x[1]]),
        lambda x: np.array([[2.0 * x[0], 2.0 * x[1]], [1.0, -1.0]]),
    )
    entries.append(CatalogEntry(
        "boxed_gauss_newton",
        CompositeProblem(box_map, L2Norm(), BoxIndicator([0.0, 0.0], [2.0, 2.0]), "boxed_gauss_newton"),
        np.array([2.0, 0.5]),
        (np.array([1.0, 1.0]), 0.0, "residuals vanish at (1, 1) inside the box"),
    ))

    entries.append(CatalogEntry(
        "unbounded_linear",
        CompositeProblem(SmoothMap.linear([[1.0]]), ScalarIdentity(), Zero(), "unbounded_linear"),
        np.array([0.0]),
    ))

    # |sin x1| + |cos x2|: |J|_2 <= 1 and J is 1-Lipschitz; |.|_1 is sqrt(2)-Lipschitz in l2
    sincos = SmoothMap(
        2,
        2,
        lambda x: np.array([math.sin(x[0]), math.cos(x[1])]),
        lambda x: np.array([[math.cos(x[0]), 0.0], [0.0, -math.sin(x[1])]]),
    )
    entries.append(CatalogEntry(
        "sincos_l1",
        CompositeProblem(sincos, L1Norm(), Zero(), "sincos_l1"),
        np.array([0.7, 0.4]),
        (np.array([0.0, math.pi / 2]), 0.0, "sin 0 = cos(pi/2) = 0"),
        LipschitzData(L_c=1.0, L_cprime=1.0, L_h=math.sqrt(2.0), L_g=0.0),
    ))
    return entries


def get_entry(name: str, seed: int = 0) -> CatalogEntry:
    for e in load_catalog(seed):
        if e.name == name:
            return e
    raise KeyError(f"unknown catalog problem {name!r}")
