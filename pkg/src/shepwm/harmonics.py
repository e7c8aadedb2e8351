"""Spectral checks of switching-angle groups and the modulation-index sweep."""

from __future__ import annotations

import csv
import itertools
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import as_rational
from .parametric import BadParameterError, ParametricRUR
from .solve import solve

log = logging.getLogger(__name__)

PRINTED_TOL = 1e-3
COMPUTED_TOL = 1e-8


def _check_order(k: int) -> None:
    if k <= 0 or k % 2 == 0:
        raise ValueError(f"harmonic order must be odd and positive, got {k}")


def fourier_b(angles_rad: Sequence[float], k: int) -> float:
    """Sine coefficient ``b_k`` of the unit-amplitude three-level waveform."""
    _check_order(k)
    total = sum((-1) ** j * math.cos(k * a) for j, a in enumerate(angles_rad))
    return 4.0 / (k * math.pi) * total


def _quarter_level(theta: np.ndarray, angles: Sequence[float]) -> np.ndarray:
    # number of switching instants passed, mod 2, on [0, pi/2]
    passed = np.searchsorted(np.asarray(sorted(angles)), theta, side="right")
    return (passed % 2).astype(float)


def waveform_level(theta: np.ndarray, angles_rad: Sequence[float]) -> np.ndarray:
    """Exact waveform value at phases ``theta`` (any real values)."""
    th = np.mod(theta, 2 * np.pi)
    sign = np.where(th < np.pi, 1.0, -1.0)
    th = np.mod(th, np.pi)
    th = np.where(th > np.pi / 2, np.pi - th, th)
    return sign * _quarter_level(th, angles_rad)


def _cell_average(edges: np.ndarray, angles_rad: Sequence[float]) -> np.ndarray:
    """Average of the waveform over each cell ``[edges[i], edges[i+1]]``."""
    breaks = []
    for a in angles_rad:
        breaks += [a, np.pi - a, np.pi + a, 2 * np.pi - a]
    breaks = np.array(sorted(breaks + [0.0, np.pi, 2 * np.pi]))
    # primitive of the waveform evaluated at arbitrary points
    mid = 0.5 * (breaks[:-1] + breaks[1:])
    levels = waveform_level(mid, angles_rad)
    cum = np.concatenate([[0.0], np.cumsum(levels * np.diff(breaks))])

    def primitive(x):
        idx = np.clip(np.searchsorted(breaks, x, side="right") - 1, 0, len(levels) - 1)
        return cum[idx] + levels[idx] * (x - breaks[idx])

    return np.diff(primitive(edges)) / np.diff(edges)


def synthesize_waveform(angles_rad: Sequence[float], samples_per_period: int, *,
                        cell_average: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """One period of the waveform on a uniform grid of cell midpoints.

    Returns ``(theta, u)``.  With ``cell_average`` each sample is the exact mean of
    the waveform over its cell, so quadrature is not spoiled by where the switching
    instants fall relative to the grid.
    """
    s = int(samples_per_period)
    edges = np.linspace(0.0, 2 * np.pi, s + 1)
    theta = 0.5 * (edges[:-1] + edges[1:])
    if cell_average:
        u = _cell_average(edges, angles_rad)
    else:
        u = waveform_level(theta, angles_rad)
    return theta, u


def numeric_b(theta: np.ndarray, u: np.ndarray, k: int) -> float:
    """``b_k`` by the periodic trapezoid rule on uniformly spaced samples."""
    h = 2 * np.pi / len(u)
    return float(np.sum(u * np.sin(k * theta)) * h / np.pi)


@dataclass(frozen=True)
class VerifyReport:
    table: dict[int, float]
    orders: tuple[int, ...]
    m: Fraction | None
    tol: float
    passed: bool
    failures: tuple[str, ...] = ()

    def lines(self) -> list[str]:
        out = [f"{'k':>4}  {'b_k':>14}"]
        for k, b in self.table.items():
            out.append(f"{k:>4}  {b:>14.6e}")
        if self.m is not None:
            out.append(f"target b_1 = 4m/pi = {4 * float(self.m) / math.pi:.8f}")
        out.append("PASS" if self.passed else "FAIL: " + "; ".join(self.failures))
        return out


def verify(angles_deg: Sequence[float], orders: Sequence[int], m=None,
           tol: float = PRINTED_TOL) -> VerifyReport:
    """Check that the listed harmonics vanish (and ``b_1 = 4m/pi`` when ``m`` is given)."""
    angles = [float(a) for a in angles_deg]
    if not angles:
        raise ValueError("no angles given")
    if any(not 0 <= a < 90 for a in angles):
        raise ValueError("angles must lie in [0, 90) degrees")
    if any(b <= a for a, b in zip(angles, angles[1:])):
        raise ValueError("angles must be strictly increasing")
    for k in orders:
        _check_order(int(k))
    rad = [math.radians(a) for a in angles]
    ks = [1] + [int(k) for k in orders if int(k) != 1]
    table = {k: fourier_b(rad, k) for k in ks}
    failures = []
    for k in ks[1:]:
        if abs(table[k]) >= tol:
            failures.append(f"|b_{k}| = {abs(table[k]):.3e} >= {tol:g}")
    mq = None
    if m is not None:
        mq = as_rational(m) if not isinstance(m, float) else Fraction(m)
        err = abs(table[1] - 4 * float(mq) / math.pi)
        if err >= tol:
            failures.append(f"|b_1 - 4m/pi| = {err:.3e} >= {tol:g}")
    return VerifyReport(table, tuple(ks[1:]), mq, tol, not failures, tuple(failures))


# ---------------------------------------------------------------------------
# sweep


@dataclass(frozen=True)
class SweepRow:
    m: Fraction
    group_index: int
    angles_deg: tuple[float, ...]


@dataclass
class SweepResult:
    n: int
    rows: list[SweepRow] = field(default_factory=list)
    counts: dict[Fraction, int] = field(default_factory=dict)
    timings: dict[Fraction, float] = field(default_factory=dict)
    skipped: dict[Fraction, str] = field(default_factory=dict)

    def groups_at(self, m) -> list[SweepRow]:
        m = as_rational(m)
        return [r for r in self.rows if r.m == m]

    def count_summary(self) -> list[tuple[Fraction, Fraction, int]]:
        """Maximal runs of grid points with equal group count: ``(first, last, count)``."""
        runs = []
        for m in sorted(self.counts):
            c = self.counts[m]
            if runs and runs[-1][2] == c:
                runs[-1] = (runs[-1][0], m, c)
            else:
                runs.append((m, m, c))
        return runs

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["m", "group_index"] + [f"alpha_{i}" for i in range(1, self.n + 1)])
            for r in self.rows:
                w.writerow([f"{float(r.m):.6f}", r.group_index] + [f"{a:.5f}" for a in r.angles_deg])

    def write_svg(self, path) -> None:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(8, 5))
        colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
        labels = sorted({r.group_index for r in self.rows})
        for gi in labels:
            pts = [r for r in self.rows if r.group_index == gi]
            ms = [float(r.m) for r in pts for _ in r.angles_deg]
            angs = [a for r in pts for a in r.angles_deg]
            ax.scatter(ms, angs, s=2, color=colors[gi % len(colors)], label=f"group {gi}")
        ax.set_xlabel("modulation index m")
        ax.set_ylabel("switching angle (deg)")
        ax.set_ylim(0, 90)
        ax.set_title(f"Switching angle trajectories, N = {self.n}")
        if labels:
            ax.legend(markerscale=4, fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg")
        plt.close(fig)


def grid(m_from, m_to, step) -> list[Fraction]:
    a, b, h = as_rational(m_from), as_rational(m_to), as_rational(step)
    if not 0 < a < b < 1:
        raise ValueError("need 0 < from < to < 1")
    if h <= 0:
        raise ValueError("step must be positive")
    first = math.ceil(a / h)
    last = math.floor(b / h)
    return [i * h for i in range(first, last + 1)]


def _jump(a: Sequence[float], b: Sequence[float]) -> float:
    return max(abs(x - y) for x, y in zip(a, b))


def _best_pairing(prev: Sequence[Sequence[float]], cur: Sequence[Sequence[float]]):
    """Pairs ``(i_prev, j_cur)`` covering the smaller side with minimal total jump."""
    if len(prev) <= len(cur):
        choices = ((tuple(range(len(prev))), perm)
                   for perm in itertools.permutations(range(len(cur)), len(prev)))
    else:
        choices = ((perm, tuple(range(len(cur))))
                   for perm in itertools.permutations(range(len(prev)), len(cur)))
    best, best_cost = [], math.inf
    for ip, jc in choices:
        cost = sum(_jump(prev[i], cur[j]) for i, j in zip(ip, jc))
        if cost < best_cost:
            best, best_cost = list(zip(ip, jc)), cost
    return best


def _match(prev: list[tuple[int, tuple[float, ...]]], cur: list[tuple[float, ...]]) -> list[int]:
    """Label current groups by the nearest previous trajectories; unmatched groups
    start new labels."""
    labels: list[int | None] = [None] * len(cur)
    for i, j in _best_pairing([g for _, g in prev], cur):
        labels[j] = prev[i][0]
    used = {label for label, _ in prev}
    nxt = 0
    for j, label in enumerate(labels):
        if label is None:
            while nxt in used:
                nxt += 1
            labels[j] = nxt
            used.add(nxt)
    return labels


def _solve_one(args):
    p, m0 = args
    t0 = time.perf_counter()
    try:
        rep = solve(p, m0)
    except BadParameterError as exc:
        return m0, None, str(exc), time.perf_counter() - t0
    return m0, [g.angles_deg for g in rep.groups], "", time.perf_counter() - t0


def sweep(p: ParametricRUR, m_from, m_to, step, *, jobs: int = 1) -> SweepResult:
    """Solve on the grid ``m = i * step`` within ``[m_from, m_to]``."""
    ms = grid(m_from, m_to, step)
    tasks = [(p, m0) for m0 in ms]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_solve_one, tasks, chunksize=8))
    else:
        results = [_solve_one(t) for t in tasks]
    out = SweepResult(p.n)
    prev: list[tuple[int, tuple[float, ...]]] = []
    for m0, groups, why, dt in sorted(results, key=lambda r: r[0]):
        out.timings[m0] = dt
        if groups is None:
            log.warning("m = %s skipped: %s", m0, why)
            out.skipped[m0] = why
            prev = []
            continue
        labels = _match(prev, groups)
        out.counts[m0] = len(groups)
        order = sorted(range(len(groups)), key=lambda i: labels[i])
        for i in order:
            out.rows.append(SweepRow(m0, labels[i], tuple(groups[i])))
        prev = [(labels[i], groups[i]) for i in range(len(groups))]
    return out


def trajectory_jumps(result: SweepResult) -> list[tuple[Fraction, Fraction, float]]:
    """Per grid step inside runs of constant group count: ``(m_a, m_b, jump)``, the
    largest angle change (degrees) under the minimal-jump pairing of groups."""
    out = []
    ms = sorted(result.counts)
    for a, b in zip(ms, ms[1:]):
        if result.counts[a] != result.counts[b] or result.counts[a] == 0:
            continue
        ga = [r.angles_deg for r in result.groups_at(a)]
        gb = [r.angles_deg for r in result.groups_at(b)]
        out.append((a, b, max(_jump(ga[i], gb[j]) for i, j in _best_pairing(ga, gb))))
    return out


def max_trajectory_jump(result: SweepResult) -> float:
    return max((j for _, _, j in trajectory_jumps(result)), default=0.0)
