"""Projective metrics and Lyapunov functions on the positive orthant."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PositiveVector",
    "ExtendedNonnegReal",
    "as_positive_vector",
    "as_extended_nonneg",
    "hilbert_distance_orthant",
    "thompson_distance_orthant",
    "tsitsiklis_lyapunov",
    "birkhoff_lyapunov",
    "contraction_ratio",
]


@dataclass(frozen=True, eq=False)
class PositiveVector:
    """Strictly positive vector, i.e. an interior point of the nonnegative orthant.

    Construction rejects any entry <= 0; there is no epsilon floor, so callers
    that need boundary behaviour must model it explicitly (see
    :class:`ExtendedNonnegReal` for infinite projective diameters).
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.entries, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("PositiveVector requires a nonempty 1-d array of reals")
        if not np.all(np.isfinite(v)):
            raise ValueError("PositiveVector entries must be finite")
        if not np.all(v > 0.0):
            bad = int(np.argmin(v > 0.0))
            raise ValueError(f"entry {bad} is not strictly positive: {v[bad]}")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "entries", v)

    def __len__(self) -> int:
        return int(self.entries.size)

    @property
    def log(self) -> np.ndarray:
        return np.log(self.entries)


def as_positive_vector(x) -> PositiveVector:
    return x if isinstance(x, PositiveVector) else PositiveVector(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ExtendedNonnegReal:
    """Nonnegative real extended with an explicit point at +infinity.

    The infinite value is a deliberate constructor choice (``value=None`` or
    :meth:`infinite`), not an IEEE overflow artefact. Addition and max absorb
    it, as required for diameter arithmetic.
    """

    value: float | None

    def __post_init__(self) -> None:
        if self.value is not None:
            v = float(self.value)
            if math.isnan(v):
                raise ValueError("ExtendedNonnegReal does not accept NaN")
            if math.isinf(v):
                object.__setattr__(self, "value", None)
                return
            if v < 0.0:
                raise ValueError(f"ExtendedNonnegReal must be >= 0, got {v}")
            object.__setattr__(self, "value", v)

    @classmethod
    def finite(cls, v: float) -> "ExtendedNonnegReal":
        if math.isinf(float(v)):
            raise ValueError("use ExtendedNonnegReal.infinite() for the infinite value")
        return cls(float(v))

    @classmethod
    def infinite(cls) -> "ExtendedNonnegReal":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def as_float(self) -> float:
        return math.inf if self.value is None else self.value

    def __add__(self, other) -> "ExtendedNonnegReal":
        o = as_extended_nonneg(other)
        if self.value is None or o.value is None:
            return ExtendedNonnegReal.infinite()
        return ExtendedNonnegReal(self.value + o.value)

    __radd__ = __add__

    def __mul__(self, scalar: float) -> "ExtendedNonnegReal":
        s = float(scalar)
        if s < 0.0:
            raise ValueError("can only scale by a nonnegative factor")
        if self.value is None:
            return ExtendedNonnegReal.infinite()
        return ExtendedNonnegReal(self.value * s)

    __rmul__ = __mul__

    def __lt__(self, other) -> bool:
        return self.as_float() < as_extended_nonneg(other).as_float()

    def __le__(self, other) -> bool:
        return self.as_float() <= as_extended_nonneg(other).as_float()

    def __gt__(self, other) -> bool:
        return self.as_float() > as_extended_nonneg(other).as_float()

    def __ge__(self, other) -> bool:
        return self.as_float() >= as_extended_nonneg(other).as_float()

    def to_json(self) -> float | str:
        return "+inf" if self.value is None else self.value

    def __str__(self) -> str:
        return "+inf" if self.value is None else repr(self.value)


def as_extended_nonneg(d) -> ExtendedNonnegReal:
    if isinstance(d, ExtendedNonnegReal):
        return d
    return ExtendedNonnegReal(float(d))


def _log_ratios(x, y) -> np.ndarray:
    xv = as_positive_vector(x)
    yv = as_positive_vector(y)
    if len(xv) != len(yv):
        raise ValueError(f"dimension mismatch: {len(xv)} vs {len(yv)}")
    # log-space keeps projective invariance near machine precision for
    # widely scaled inputs
    return xv.log - yv.log


def hilbert_distance_orthant(x, y) -> float:
    """Hilbert projective distance on the open orthant.

    d(x, y) = log max_i(x_i/y_i) - log min_i(x_i/y_i). Invariant under
    positive scaling of either argument; zero exactly when x and y span
    the same ray.
    """
    r = _log_ratios(x, y)
    return float(r.max() - r.min())


def thompson_distance_orthant(x, y) -> float:
    """Thompson part metric, log max{max_i(x_i/y_i), 1/min_i(x_i/y_i)}.

    Unlike the Hilbert distance this is a true metric on the orthant
    interior: it vanishes only for x == y, not for proportional pairs.
    """
    r = _log_ratios(x, y)
    return float(max(r.max(), -r.min()))


def tsitsiklis_lyapunov(x) -> float:
    """Spread max_i x_i - min_i x_i, defined for any real vector."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("expected a nonempty 1-d real vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("entries must be finite")
    return float(v.max() - v.min())

def birkhoff_lyapunov(x) -> float:
    """Hilbert distance from x to the all-ones consensus ray.

    Equals the spread of the entrywise logarithm, so it is scaling-invariant
    where :func:`tsitsiklis_lyapunov` is translation-invariant.
    """
    return tsitsiklis_lyapunov(as_positive_vector(x).log)


def contraction_ratio(diameter) -> float:
    """Birkhoff contraction factor tanh(diameter / 4).

    An infinite diameter yields 1.0: no strict contraction is certified.
    """
    d = as_extended_nonneg(diameter)
    if not d.is_finite:
        return 1.0
    return math.tanh(d.value / 4.0)
