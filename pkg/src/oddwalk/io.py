"""CSV/JSON emitters and the on-disk spectral-measure cache."""
from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import IO

import numpy as np
from filelock import FileLock

from .jacobi import JacobiSequence
from .qclt import ConvergenceTable
from .spectral import SpectralMeasure, gauss_measure
from .walk import AmplitudeSeries

SCHEMA_VERSION = 1
CACHE_ENV = "ODDWALK_CACHE_DIR"

SERIES_COLUMNS = ["t", "m", "re_q", "im_q", "prob_stratum", "prob_vertex"]
CONVERGENCE_COLUMNS = ["k", "m", "t", "re_finite", "im_finite", "re_limit", "im_limit", "gap"]


def fmt(x) -> str:
    """Locale-independent 17-significant-digit rendering."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _writer(stream: IO[str]):
    return csv.writer(stream, lineterminator="\n")


def write_series_csv(series: AmplitudeSeries, stream: IO[str]) -> None:
    w = _writer(stream)
    w.writerow(SERIES_COLUMNS)
    probs = series.prob_stratum
    for ti, t in enumerate(series.t_grid):
        for m in range(series.m_max + 1):
            q = series.q[m, ti]
            pv = (
                probs[m, ti] / series.strata_sizes[m]
                if series.strata_sizes is not None
                else float("nan")
            )
            w.writerow([fmt(t), m, fmt(q.real), fmt(q.imag), fmt(probs[m, ti]), fmt(pv)])


def series_to_dict(series: AmplitudeSeries) -> dict:
    return {
        "mode": None if series.mode is None else series.mode.value,
        "k": series.k,
        "t_grid": series.t_grid.tolist(),
        "strata_sizes": None if series.strata_sizes is None else list(series.strata_sizes),
        "q": [
            [[float(z.real), float(z.imag)] for z in row] for row in series.q
        ],
        "conservation_max_error": float(np.max(series.conservation_error)),
        "conserved": series.conserved,
    }


def write_convergence_csv(table: ConvergenceTable, stream: IO[str]) -> None:
    w = _writer(stream)
    w.writerow(CONVERGENCE_COLUMNS)
    for r in table.rows:
        w.writerow([
            r.k, r.m, fmt(r.t), fmt(r.finite.real), fmt(r.finite.imag),
            fmt(r.limit.real), fmt(r.limit.imag), fmt(r.gap),
        ])


def dump_json(obj, stream: IO[str]) -> None:
    json.dump(obj, stream, indent=2, sort_keys=False)
    stream.write("\n")


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "oddwalk"


class MeasureCache:
    """JSON files keyed by (mode, k, n); entries with another schema are rebuilt."""

    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def path(self, mode: str, k: int | None, n: int) -> Path:
        kpart = "inf" if k is None else str(k)
        return self.root / f"{mode}_k{kpart}_n{n}.json"

    def load(self, mode: str, k: int | None, n: int) -> SpectralMeasure | None:
        path = self.path(mode, k, n)
        try:
            data = json.loads(path.read_text())
        except (OSError, ValueError):
            return None
        if data.get("schema_version") != SCHEMA_VERSION:
            return None
        return SpectralMeasure.from_dict(data)

    def store(self, measure: SpectralMeasure) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        mode = measure.mode.value if measure.mode is not None else "none"
        path = self.path(mode, measure.k, measure.n)
        payload = {"schema_version": SCHEMA_VERSION, **measure.to_dict()}
        with FileLock(str(self.root / ".lock")):
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(payload))
            tmp.replace(path)
        return path

    def get(self, jac: JacobiSequence, n: int | None = None, **opts) -> SpectralMeasure:
        n = jac.n_levels if n is None else n
        hit = self.load(jac.mode.value, jac.k, n)
        if hit is not None:
            return hit
        measure = gauss_measure(jac, n, **opts)
        self.store(measure)
        return measure
