"""Random-matrix generator and the scalability benchmark harness.

The generator draws each column uniformly as feature-like (Yes/No cells) or
attribute-like (naturals from a fresh alphabet of the requested maximum
domain size).  Requested row and domain counts are upper bounds: duplicate
rows are dropped and missing values are not corrected, so effective counts
are reported rather than forced.

The benchmark sweeps generator parameters, runs the synthesis per point with
per-phase timers, and fits the observed trends: time against the number of
configurations, and the square root of time against the number of variables
and against the effective maximum domain size, each with a Pearson
correlation coefficient.  Timing covers synthesis only, never I/O or report
formatting.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ForgeError
from .knowledge import DefaultProvider, DomainKnowledge
from .matrix import ConfigurationMatrix, matrix_from_codes
from .pipeline import SynthesisOptions, synthesize

PHASES = ("extraction", "binary_implications", "graphs", "hierarchy", "placement",
          "mandatory", "groups", "rc", "rc_complex", "phi")


@dataclass
class GeneratorParams:
    v: int
    c: int
    d: int
    seed: int = 0

    def __post_init__(self):
        if self.v < 1 or self.c < 1 or self.d < 2:
            raise ForgeError(f"generator needs v >= 1, c >= 1, d >= 2, got {self}")


def generate_matrix(p: GeneratorParams) -> ConfigurationMatrix:
    """Seeded random configuration matrix; deterministic for a fixed seed."""
    rng = np.random.default_rng(p.seed)
    kinds = rng.integers(0, 2, size=p.v)  # 0: feature-like, 1: attribute-like
    raw = np.empty((p.c, p.v), dtype=np.int64)
    for j in range(p.v):
        hi = 2 if kinds[j] == 0 else p.d
        raw[:, j] = rng.integers(0, hi, size=p.c)

    _, first = np.unique(raw, axis=0, return_index=True)
    rows = raw[np.sort(first)]

    names, numeric, values, codes = [], [], [], []
    for j in range(p.v):
        col = rows[:, j]
        seen, vals = {}, []
        remap = np.empty(len(col), dtype=np.int32)
        for k, x in enumerate(col):
            x = int(x)
            if x not in seen:
                seen[x] = len(vals)
                vals.append(x)
            remap[k] = seen[x]
        names.append(f"V{j}")
        if kinds[j] == 0:
            numeric.append(False)
            values.append(["Yes" if x else "No" for x in vals])
        else:
            numeric.append(True)
            values.append(vals)
        codes.append(remap)
    dropped = p.c - len(rows)
    return matrix_from_codes(names, numeric, values, codes, duplicates_dropped=dropped)


def derive_seed(*parts) -> int:
    """Deterministic 48-bit seed from arbitrary labels (hash() is salted)."""
    text = ":".join(str(p) for p in parts)
    return int(hashlib.sha256(text.encode()).hexdigest()[:12], 16)


def effective_stats(matrix: ConfigurationMatrix) -> dict:
    return {"c_eff": matrix.n_rows,
            "d_eff": max(col.domain_size for col in matrix.columns)}


@dataclass
class RunRecord:
    v: int
    c: int
    d: int
    seed: int
    rep: int
    backend: str
    c_eff: int
    d_eff: int
    total: float
    phases: dict
    timed_out: bool


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2 or np.allclose(x, x[0]) or np.allclose(y, y[0]):
        return float("nan")
    return float(np.corrcoef(x, y)[0, 1])


@dataclass
class BenchReport:
    runs: list = field(default_factory=list)
    fits: list = field(default_factory=list)

    def to_csv(self) -> str:
        cols = ["v", "c", "d", "seed", "rep", "backend", "c_eff", "d_eff",
                "total_s", "timed_out", *[f"{p}_s" for p in PHASES]]
        lines = [",".join(cols)]
        for r in self.runs:
            vals = [r.v, r.c, r.d, r.seed, r.rep, r.backend, r.c_eff, r.d_eff,
                    f"{r.total:.6f}", int(r.timed_out),
                    *[f"{r.phases.get(p, 0.0):.6f}" for p in PHASES]]
            lines.append(",".join(str(v) for v in vals))
        return "\n".join(lines) + "\n"

    def plot_data(self) -> str:
        lines = ["series\tx\ty"]
        for fit in self.fits:
            for x, y in zip(fit["x"], fit["y"]):
                lines.append(f"{fit['series']}\t{x:g}\t{y:.6f}")
        return "\n".join(lines) + "\n"

    def fit_for(self, series: str) -> dict | None:
        for fit in self.fits:
            if fit["series"] == series:
                return fit
        return None


def _median_total(records) -> float:
    return float(np.median([r.total for r in records]))


def _bench_one(params, sweep_param, value, rep, base_seed, or_groups,
               or_budget_ms, backend) -> RunRecord:
    seed = derive_seed(base_seed, sweep_param, value, rep)
    gp = GeneratorParams(params["v"], params["c"], params["d"], seed=seed)
    matrix = generate_matrix(gp)
    opts = SynthesisOptions(or_groups=or_groups, or_budget_ms=or_budget_ms,
                            backend=None if backend == "auto" else backend)
    t0 = time.perf_counter()
    model = synthesize(matrix, DefaultProvider(DomainKnowledge()), opts)
    total = time.perf_counter() - t0
    stats = effective_stats(matrix)
    return RunRecord(gp.v, gp.c, gp.d, seed, rep, backend,
                     stats["c_eff"], stats["d_eff"], total, dict(model.timings),
                     bool(model.provenance.get("or_groups_timed_out")))


def run_benchmark(sweep_param: str, sweep_values, fixed: dict, reps: int = 10,
                  base_seed: int = 0, or_groups: bool = False,
                  or_budget_ms: int | None = None, backends=("auto",),
                  warmup: bool = True, parallel: bool = False) -> BenchReport:
    """Sweep one generator parameter and fit the declared trend.

    `fixed` holds the other two of v/c/d.  Every (point, rep) pair gets its
    own derived seed so runs are independent but reproducible.  With several
    backends the sweep runs once per backend (the comparison mode).  Points
    run sequentially by default for stable timing; `parallel` trades timing
    stability for throughput, with per-point isolated timers.
    """
    report = BenchReport()
    if warmup:
        tiny = generate_matrix(GeneratorParams(3, 4, 2, seed=1))
        for backend in backends:
            synthesize(tiny, DefaultProvider(DomainKnowledge()),
                       SynthesisOptions(backend=None if backend == "auto" else backend))

    for backend in backends:
        jobs = [(dict(fixed, **{sweep_param: value}), value, rep)
                for value in sweep_values for rep in range(reps)]
        if parallel:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=min(4, len(jobs) or 1)) as pool:
                futures = [pool.submit(_bench_one, params, sweep_param, value, rep,
                                       base_seed, or_groups, or_budget_ms, backend)
                           for params, value, rep in jobs]
                report.runs.extend(f.result() for f in futures)
        else:
            for params, value, rep in jobs:
                report.runs.append(_bench_one(params, sweep_param, value, rep,
                                              base_seed, or_groups, or_budget_ms, backend))

        by_value = {}
        for r in report.runs:
            if r.backend != backend:
                continue
            key = getattr(r, sweep_param) if sweep_param != "d" else r.d
            by_value.setdefault(key, []).append(r)
        xs = sorted(by_value)
        med = [_median_total(by_value[x]) for x in xs]
        suffix = "" if len(backends) == 1 else f"[{backend}]"
        if sweep_param == "c":
            x_eff = [float(np.median([r.c_eff for r in by_value[x]])) for x in xs]
            report.fits.append({"series": f"time-vs-c{suffix}", "x": x_eff, "y": med,
                                "r": pearson(x_eff, med)})
        elif sweep_param == "v":
            report.fits.append({"series": f"sqrt-time-vs-v{suffix}", "x": [float(x) for x in xs],
                                "y": [math.sqrt(t) for t in med],
                                "r": pearson(xs, [math.sqrt(t) for t in med])})
        else:
            x_eff = [float(np.median([r.d_eff for r in by_value[x]])) for x in xs]
            report.fits.append({"series": f"sqrt-time-vs-d{suffix}", "x": x_eff,
                                "y": [math.sqrt(t) for t in med],
                                "r": pearson(x_eff, [math.sqrt(t) for t in med])})
    return report


def or_group_wall(v_values, c: int, d: int, budget_ms: int, reps: int = 3,
                  base_seed: int = 0) -> dict:
    """Timeout frequency of the or-group search per variable count."""
    rates = {}
    for v in v_values:
        hits = 0
        for rep in range(reps):
            seed = derive_seed(base_seed, "orwall", v, rep)
            matrix = generate_matrix(GeneratorParams(v, c, d, seed=seed))
            model = synthesize(matrix, DefaultProvider(DomainKnowledge()),
                               SynthesisOptions(or_groups=True, or_budget_ms=budget_ms))
            hits += bool(model.provenance.get("or_groups_timed_out"))
        rates[v] = hits / reps
    return rates
