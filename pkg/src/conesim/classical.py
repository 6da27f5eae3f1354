"""Row-stochastic consensus iteration, projective diameters, and Birkhoff certificates."""
from __future__ import annotations

from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field
from itertools import islice

import numpy as np

from .cones import (
    ExtendedNonnegReal,
    birkhoff_lyapunov,
    contraction_ratio,
    hilbert_distance_orthant,
    tsitsiklis_lyapunov,
)
from .trace import SimulationTrace, StoppingRule, TerminalStatus, TraceRecord

__all__ = [
    "StochasticMatrix",
    "StochasticMatrixSequence",
    "ConnectivityReport",
    "ContractionCheckReport",
    "random_stochastic_matrix",
    "consensus_step",
    "dual_consensus_step",
    "run_consensus",
    "run_dual_consensus",
    "projective_diameter",
    "check_birkhoff_contraction",
    "check_connectivity",
]

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Nonnegative square matrix with unit row sums.

    Rows are never renormalized silently; a row off by more than ROW_SUM_TOL
    is a construction error so that scenario-file bugs fail loudly.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError("StochasticMatrix requires a square 2-d array")
        if not np.all(np.isfinite(m)):
            raise ValueError("StochasticMatrix entries must be finite")
        if np.any(m < 0.0):
            i, j = np.unravel_index(int(np.argmin(m)), m.shape)
            raise ValueError(f"negative entry at ({i},{j}): {m[i, j]}")
        sums = m.sum(axis=1)
        bad = np.abs(sums - 1.0) > ROW_SUM_TOL
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ValueError(
                f"row {i} sums to {float(sums[i])!r}, expected 1 within {ROW_SUM_TOL}"
            )
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])


def as_stochastic_matrix(A) -> StochasticMatrix:
    return A if isinstance(A, StochasticMatrix) else StochasticMatrix(np.asarray(A, dtype=float))


def random_stochastic_matrix(
    n: int, rng: np.random.Generator, density: float | None = None
) -> StochasticMatrix:
    """Draw i.i.d. uniform entries and normalize rows.

    An optional sparsity mask keeps each entry with probability `density`,
    with the diagonal always present so every row stays normalizable and the
    positive-diagonal hypothesis class is matched.
    """
    entries = rng.uniform(size=(n, n))
    if density is not None:
        mask = rng.uniform(size=(n, n)) < density
        np.fill_diagonal(mask, True)
        entries = entries * mask
    entries = entries / entries.sum(axis=1, keepdims=True)
    return StochasticMatrix(entries)


@dataclass(frozen=True, eq=False)
class StochasticMatrixSequence:
    """Finite or generator-backed sequence of same-dimension stochastic matrices.

    Generator-backed sequences are reproducible: every iteration restarts the
    stream from the stored seed.
    """

    dimension: int
    length: int | None
    _make_iter: Callable[[], Iterator[StochasticMatrix]] = field(repr=False)

    def __iter__(self) -> Iterator[StochasticMatrix]:
        return self._make_iter()

    @classmethod
    def constant(cls, A) -> "StochasticMatrixSequence":
        mat = as_stochastic_matrix(A)

        def gen() -> Iterator[StochasticMatrix]:
            while True:
                yield mat

        return cls(mat.n, None, gen)

    @classmethod
    def from_matrices(cls, matrices: Iterable) -> "StochasticMatrixSequence":
        mats = tuple(as_stochastic_matrix(A) for A in matrices)
        if not mats:
            raise ValueError("sequence needs at least one matrix")
        n = mats[0].n
        for k, m in enumerate(mats):
            if m.n != n:
                raise ValueError(f"matrix {k} has dimension {m.n}, expected {n}")
        return cls(n, len(mats), lambda: iter(mats))

    @classmethod
    def random_iid(
        cls,
        n: int,
        seed: int,
        length: int | None = None,
        density: float | None = None,
    ) -> "StochasticMatrixSequence":
        def gen() -> Iterator[StochasticMatrix]:
            rng = np.random.default_rng(seed)
            count = 0
            while length is None or count < length:
                yield random_stochastic_matrix(n, rng, density)
                count += 1

        return cls(n, length, gen)

    def first(self, count: int) -> list[StochasticMatrix]:
        mats = list(islice(iter(self), count))
        if len(mats) < count:
            raise ValueError(f"sequence has only {len(mats)} matrices, requested {count}")
        return mats


def as_stochastic_sequence(seq) -> StochasticMatrixSequence:
    if isinstance(seq, StochasticMatrixSequence):
        return seq
    if isinstance(seq, StochasticMatrix):
        return StochasticMatrixSequence.constant(seq)
    if isinstance(seq, np.ndarray) and seq.ndim == 2:
        return StochasticMatrixSequence.constant(seq)
    if isinstance(seq, (list, tuple)):
        return StochasticMatrixSequence.from_matrices(seq)
    raise TypeError(f"cannot interpret {type(seq).__name__} as a stochastic matrix sequence")


def _check_vector(x, n: int) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size != n:
        raise ValueError(f"state vector must have shape ({n},), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("state vector entries must be finite")
    return v


def consensus_step(A, x) -> np.ndarray:
    """One averaging update A @ x; each output entry is a convex combination
    of the inputs."""
    mat = as_stochastic_matrix(A)
    return mat.entries @ _check_vector(x, mat.n)


def dual_consensus_step(A, z) -> np.ndarray:
    """Dual update A^T @ z, which conserves the total mass sum(z)."""
    mat = as_stochastic_matrix(A)
    return mat.entries.T @ _check_vector(z, mat.n)


def run_consensus(sequence, x0, stop: StoppingRule | None = None, limit=None) -> SimulationTrace:
    """Iterate x(t+1) = A(t) x(t) until the spread max-min falls below tolerance.

    Each record carries the spread, the state interval [min, max], the
    log-coordinate (projective) distance to consensus when the state is
    strictly positive, and the sup-norm distance to `limit` when one is
    supplied. A finite sequence that runs out before the stopping rule fires
    yields status ``incomplete_sequence``.
    """
    stop = stop or StoppingRule()
    seq = as_stochastic_sequence(sequence)
    x = _check_vector(x0, seq.dimension).copy()
    limit_v = None if limit is None else _check_vector(limit, seq.dimension)

    records: list[TraceRecord] = []

    def record(t: int, state: np.ndarray) -> float:
        v = tsitsiklis_lyapunov(state)
        proj = birkhoff_lyapunov(state) if np.all(state > 0.0) else None
        dist = None if limit_v is None else float(np.max(np.abs(state - limit_v)))
        records.append(
            TraceRecord(t, v, float(state.min()), float(state.max()), dist, proj)
        )
        return v

    v = record(0, x)
    status = TerminalStatus.MAX_ITERATIONS
    t = 0
    if v < stop.tolerance:
        status = TerminalStatus.CONVERGED
    else:
        it = iter(seq)
        while t < stop.max_iterations:
            A = next(it, None)
            if A is None:
                status = TerminalStatus.INCOMPLETE_SEQUENCE
                break
            x = A.entries @ x
            t += 1
            v = record(t, x)
            if v < stop.tolerance:
                status = TerminalStatus.CONVERGED
                break
    return SimulationTrace(records, status, x, t)


def run_dual_consensus(
    sequence, z0, stop: StoppingRule | None = None, limit=None
) -> SimulationTrace:
    """Iterate z(t+1) = A(t)^T z(t).

    The dual flow conserves sum(z) but carries no monotone spread certificate,
    so the Lyapunov column is left empty and the run stops when successive
    states differ by less than tolerance in sup norm.
    """
    stop = stop or StoppingRule()
    seq = as_stochastic_sequence(sequence)
    z = _check_vector(z0, seq.dimension).copy()
    limit_v = None if limit is None else _check_vector(limit, seq.dimension)

    records: list[TraceRecord] = []

    def record(t: int, state: np.ndarray) -> None:
        dist = None if limit_v is None else float(np.max(np.abs(state - limit_v)))
        records.append(TraceRecord(t, None, float(state.min()), float(state.max()), dist))

    record(0, z)
    status = TerminalStatus.MAX_ITERATIONS
    t = 0
    it = iter(seq)
    while t < stop.max_iterations:
        A = next(it, None)
        if A is None:
            status = TerminalStatus.INCOMPLETE_SEQUENCE
            break
        z_new = A.entries.T @ z
        t += 1
        record(t, z_new)
        step = float(np.max(np.abs(z_new - z)))
        z = z_new
        if step < stop.tolerance:
            status = TerminalStatus.CONVERGED
            break
    return SimulationTrace(records, status, z, t)


def _as_nonneg_matrix(A) -> np.ndarray:
    if isinstance(A, StochasticMatrix):
        return A.entries
    m = np.asarray(A, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError("expected a square 2-d array")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    if np.any(m < 0.0):
        raise ValueError("matrix must be entrywise nonnegative")
    return m


def projective_diameter(A) -> ExtendedNonnegReal:
    """Projective diameter of a nonnegative matrix as a map on the orthant.

    Exact enumeration of the cross-ratio sup over all index quadruples
    (i, j, p, q):  log( a_ij a_pq / (a_iq a_pj) ).  Infinite exactly when a
    quadruple has a positive numerator over a zero denominator. The O(n^4)
    enumeration is intended for desk scale (n <= 32).
    """
    m = _as_nonneg_matrix(A)
    pos = m > 0.0
    if not pos.any(axis=1).all():
        i = int(np.argmin(pos.any(axis=1)))
        raise ValueError(f"row {i} is zero: not a map into the cone")
    # axes: (i, j, p, q)
    num = pos[:, :, None, None] & pos[None, None, :, :]
    den = pos[:, None, None, :] & pos.T[None, :, :, None]
    if np.any(num & ~den):
        return ExtendedNonnegReal.infinite()
    logs = np.where(pos, np.log(np.where(pos, m, 1.0)), 0.0)
    vals = (
        logs[:, :, None, None]
        + logs[None, None, :, :]
        - logs[:, None, None, :]
        - logs.T[None, :, :, None]
    )
    return ExtendedNonnegReal(float(vals[num].max()))


@dataclass(frozen=True)
class ContractionCheckReport:
    diameter: ExtendedNonnegReal
    contraction_bound: float
    worst_ratio: float | None
    pairs_checked: int
    pairs_skipped: int
    violations: int

    @property
    def certified(self) -> bool:
        return self.diameter.is_finite

    @property
    def satisfied(self) -> bool:
        return self.violations == 0


def check_birkhoff_contraction(A, pairs, slack: float = 1e-9) -> ContractionCheckReport:
    """Verify d(Ax, Ay) <= tanh(diameter/4) d(x, y) + slack over the given pairs.

    Pairs at Hilbert distance zero are skipped (the ratio is undefined) and
    counted separately. The worst observed ratio d(Ax, Ay)/d(x, y) is
    reported; when the diameter is infinite the bound degenerates to 1 and no
    strict contraction is certified.
    """
    m = _as_nonneg_matrix(A)
    diam = projective_diameter(m)
    bound = contraction_ratio(diam)
    worst: float | None = None
    checked = skipped = violations = 0
    for x, y in pairs:
        xv = np.asarray(x, dtype=float)
        yv = np.asarray(y, dtype=float)
        d_xy = hilbert_distance_orthant(xv, yv)
        if d_xy == 0.0:
            skipped += 1
            continue
        d_img = hilbert_distance_orthant(m @ xv, m @ yv)
        checked += 1
        ratio = d_img / d_xy
        if worst is None or ratio > worst:
            worst = ratio
        if d_img > bound * d_xy + slack:
            violations += 1
    return ContractionCheckReport(diam, bound, worst, checked, skipped, violations)


@dataclass(frozen=True)
class ConnectivityReport:
    """Measured hypotheses for uniform convergence over a window [t0, t0 + T].

    `min_positive_entry` is the uniform lower bound on nonzero weights over
    the window (measured, not enforced); `root_exists` says whether the union
    digraph has a node from which every node is reachable.
    """

    window_start: int
    horizon: int
    root_exists: bool
    root_node: int | None
    min_positive_entry: float
    diagonal_positive: bool


def check_connectivity(
    sequence, window_start: int = 0, horizon: int = 0, transpose: bool = False
) -> ConnectivityReport:
    """Inspect the union graph of a matrix window for a spanning root.

    The default convention draws an edge j -> i when a_ij(t) > 0 for some t
    in the window (information flows from j to i). Set `transpose=True` for
    the opposite orientation. The window is [window_start, window_start +
    horizon], inclusive.
    """
    if horizon < 0:
        raise ValueError("empty window: horizon must be >= 0")
    if window_start < 0:
        raise ValueError("window_start must be >= 0")
    seq = as_stochastic_sequence(sequence)
    mats = seq.first(window_start + horizon + 1)[window_start:]
    n = seq.dimension

    union = np.zeros((n, n), dtype=bool)
    min_pos = np.inf
    diag_pos = True
    for m in mats:
        e = m.entries
        pos = e > 0.0
        union |= pos
        if pos.any():
            min_pos = min(min_pos, float(e[pos].min()))
        diag_pos = diag_pos and bool(np.all(np.diagonal(e) > 0.0))

    adj = union.T if transpose else union
    # successors(j) = {i : adj[i, j]}
    root: int | None = None
    for r in range(n):
        seen = np.zeros(n, dtype=bool)
        stack = [r]
        seen[r] = True
        while stack:
            j = stack.pop()
            for i in np.flatnonzero(adj[:, j]):
                if not seen[i]:
                    seen[i] = True
                    stack.append(int(i))
        if seen.all():
            root = r
            break
    return ConnectivityReport(
        window_start=window_start,
        horizon=horizon,
        root_exists=root is not None,
        root_node=root,
        min_positive_entry=float(min_pos),
        diagonal_positive=diag_pos,
    )
