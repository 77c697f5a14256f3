"""Change-point detection over feature matrices.

A segmentation of the interval axis is scored as the sum, over segments, of
the within-segment squared deviation from the segment mean (summed across
all feature rows) plus a penalty ``beta`` per segment. :func:`pelt` finds
the exact minimiser with pruned dynamic programming; ``brute_force_optimal``
is the unpruned quadratic program kept as an independent oracle.

Both report a change point as the 1-based index of the first interval of
each new segment, break cost ties toward fewer change points and then
toward earlier indices, and respect a minimum segment length.

Matrices are usually normalised first so that the penalty is comparable
across features with different scales: ``max_abs`` divides each row by its
maximum absolute value (default), ``zscore`` standardises each row, and
``none`` leaves the values alone.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as _replace

import numpy as np

from .errors import ConfigInvalid, SpanTooShort
from .timeseries import TimeInterval, TimeSeriesMatrix

NORMALIZATIONS = ("max_abs", "zscore", "none")


@dataclass(frozen=True)
class PeltConfig:
    beta: float
    min_segment_length: int = 2
    normalize: str = "max_abs"

    def __post_init__(self):
        if self.beta < 0:
            raise ConfigInvalid(f"penalty must be non-negative, got {self.beta}")
        if self.min_segment_length < 1:
            raise ConfigInvalid("minimum segment length must be at least 1")
        if self.normalize not in NORMALIZATIONS:
            raise ConfigInvalid(
                f"unknown normalization {self.normalize!r}; expected one of {NORMALIZATIONS}"
            )


@dataclass(frozen=True)
class ChangePoint:
    """First interval of a new segment; ``index`` is 1-based."""

    index: int
    interval: TimeInterval


@dataclass(frozen=True)
class ChangePointSet:
    """Detected change points plus the achieved objective value.

    ``total_cost`` is the penalised objective of the returned segmentation
    on the matrix the detector actually ran on (i.e. after normalization).
    ``evaluations`` counts candidate transitions inspected by the search,
    which lets tests confirm that pruning never does more work than the
    unpruned program.
    """

    points: tuple[ChangePoint, ...]
    total_cost: float
    evaluations: int

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(p.index for p in self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def normalize(matrix: TimeSeriesMatrix, mode: str = "max_abs") -> TimeSeriesMatrix:
    """Return a row-rescaled copy of the matrix.

    ``max_abs`` leaves all-zero rows untouched; ``zscore`` maps
    zero-variance rows to all zeros so they cannot attract change points.
    """
    if mode not in NORMALIZATIONS:
        raise ConfigInvalid(f"unknown normalization {mode!r}; expected one of {NORMALIZATIONS}")
    values = np.array(matrix.values, dtype=float, copy=True)
    if mode == "max_abs":
        scale = np.abs(values).max(axis=1)
        nonzero = scale > 0
        values[nonzero] /= scale[nonzero, None]
    elif mode == "zscore":
        mean = values.mean(axis=1, keepdims=True)
        std = values.std(axis=1)
        centered = values - mean
        out = np.zeros_like(values)
        nonzero = std > 0
        out[nonzero] = centered[nonzero] / std[nonzero, None]
        values = out
    return _replace(matrix, values=values)


class SegmentCost:
    """O(1) squared-deviation cost of any column range via prefix sums."""

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        m, n = values.shape
        self.n = n
        self._sum = np.zeros((m, n + 1))
        self._sumsq = np.zeros((m, n + 1))
        np.cumsum(values, axis=1, out=self._sum[:, 1:])
        np.cumsum(values * values, axis=1, out=self._sumsq[:, 1:])

    def cost(self, a: int, b: int) -> float:
        """Cost of columns ``[a, b)`` (0-based, half-open)."""
        length = b - a
        s = self._sum[:, b] - self._sum[:, a]
        q = self._sumsq[:, b] - self._sumsq[:, a]
        return float((q - s * s / length).sum())


def segment_cost(matrix: TimeSeriesMatrix, i: int, j: int) -> float:
    """Squared deviation from the mean over 1-based inclusive columns i..j."""
    n = matrix.n_intervals
    if not (1 <= i <= j <= n):
        raise ValueError(f"need 1 <= i <= j <= {n}, got i={i}, j={j}")
    return SegmentCost(matrix.values).cost(i - 1, j)


def _points(matrix: TimeSeriesMatrix, boundaries: tuple[int, ...]) -> tuple[ChangePoint, ...]:
    ivs = matrix.intervals.intervals
    return tuple(ChangePoint(index=b + 1, interval=ivs[b]) for b in boundaries)


def pelt(matrix: TimeSeriesMatrix, cfg: PeltConfig) -> ChangePointSet:
    """Exact penalised segmentation via pruned dynamic programming.

    States are prefix lengths; a transition from state ``s`` to ``t`` closes
    the segment covering columns ``[s, t)``. A candidate ``s`` is discarded
    once ``F(s) + cost(s, t) > F(t)``: any later segmentation through ``s``
    is then strictly beaten by one through ``t``. Because ``t`` itself is
    only usable once segments of ``min_segment_length`` fit, the discard
    takes effect ``min_segment_length`` steps later, which keeps the search
    exact rather than merely approximate under the length constraint.
    """
    work = normalize(matrix, cfg.normalize)
    n = work.n_intervals
    msl = cfg.min_segment_length
    if n < 2 * msl:
        raise SpanTooShort(
            f"{n} interval(s) cannot hold two segments of length {msl}"
        )
    cost = SegmentCost(work.values)
    beta = cfg.beta

    # state -> (objective, number of change points, boundary tuple)
    best: dict[int, tuple[float, int, tuple[int, ...]]] = {0: (0.0, 0, ())}
    candidates: list[int] = [0]
    drop_from: dict[int, int] = {}
    evaluations = 0

    for t in range(msl, n + 1):
        candidates = [s for s in candidates if drop_from.get(s, t + 1) > t]
        chosen: tuple[float, int, tuple[int, ...]] | None = None
        scored: list[tuple[int, float]] = []
        for s in candidates:
            if s and t - s < msl:
                continue
            f, k, bounds = best[s]
            base = f + cost.cost(s, t)
            entry = (base + beta, k + 1, bounds + (s,)) if s else (base + beta, 0, ())
            evaluations += 1
            scored.append((s, base))
            if chosen is None or entry < chosen:
                chosen = entry
        assert chosen is not None
        best[t] = chosen
        threshold = chosen[0]
        for s, base in scored:
            if base > threshold:
                drop_from.setdefault(s, t + msl)
        candidates.append(t)

    total, _, boundaries = best[n]
    return ChangePointSet(
        points=_points(matrix, boundaries), total_cost=total, evaluations=evaluations
    )


def brute_force_optimal(
    matrix: TimeSeriesMatrix, beta: float, min_segment_length: int = 2
) -> ChangePointSet:
    """Unpruned quadratic dynamic program over all admissible segmentations.

    Test oracle for :func:`pelt`: same objective, same tie-breaking, no
    pruning. Restricted to small inputs on purpose.
    """
    if beta < 0:
        raise ConfigInvalid(f"penalty must be non-negative, got {beta}")
    n = matrix.n_intervals
    msl = min_segment_length
    if n > 64:
        raise ValueError("brute-force search is limited to 64 intervals")
    if n < 2 * msl:
        raise SpanTooShort(f"{n} interval(s) cannot hold two segments of length {msl}")
    cost = SegmentCost(matrix.values)

    best: dict[int, tuple[float, int, tuple[int, ...]]] = {0: (0.0, 0, ())}
    evaluations = 0
    for t in range(msl, n + 1):
        chosen: tuple[float, int, tuple[int, ...]] | None = None
        for s in [0] + list(range(msl, t - msl + 1)):
            f, k, bounds = best[s]
            base = f + cost.cost(s, t)
            entry = (base + beta, k + 1, bounds + (s,)) if s else (base + beta, 0, ())
            evaluations += 1
            if chosen is None or entry < chosen:
                chosen = entry
        assert chosen is not None
        best[t] = chosen

    total, _, boundaries = best[n]
    return ChangePointSet(
        points=_points(matrix, boundaries), total_cost=total, evaluations=evaluations
    )
