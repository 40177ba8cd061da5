"""Coordinate boxes on which fields are sampled."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box ``[lower, upper]`` with a strict sampling margin.

    Bounds may be infinite (for probes that run to infinity) but such
    domains cannot be sampled.  Sampling uses the inset box
    ``[lower + margin, upper - margin]``.
    """

    lower: tuple
    upper: tuple
    margin: float = 1e-6

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if len(lower) != len(upper) or not lower:
            raise ValueError("lower and upper must have the same positive length")
        if not self.margin > 0:
            raise ValueError("margin must be positive")
        for lo, hi in zip(lower, upper):
            if np.isnan(lo) or np.isnan(hi) or not lo + self.margin < hi - self.margin:
                raise ValueError(f"empty inset interval [{lo}+{self.margin}, {hi}-{self.margin}]")

    @classmethod
    def box(cls, lower, upper, margin=1e-6):
        return cls(tuple(lower), tuple(upper), margin)

    @classmethod
    def cube(cls, n, lo, hi, margin=1e-6):
        return cls((lo,) * n, (hi,) * n, margin)

    @property
    def n(self) -> int:
        return len(self.lower)

    @property
    def bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    def inset_bounds(self):
        lo = np.asarray(self.lower) + self.margin
        hi = np.asarray(self.upper) - self.margin
        return lo, hi

    def contains(self, p, inset: bool = False) -> bool:
        """Closed-box membership of a single point."""
        p = np.asarray(p, dtype=float)
        lo, hi = self.inset_bounds() if inset else (np.asarray(self.lower), np.asarray(self.upper))
        return bool(np.all(p >= lo) and np.all(p <= hi))

    def inside(self, points):
        """Open-box membership mask for a ``(k, n)`` batch."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        return np.all((P > lo) & (P < hi), axis=1)

    def center(self):
        lo, hi = self.inset_bounds()
        if not self.bounded:
            raise ValueError("unbounded domain has no center")
        return 0.5 * (lo + hi)

    def sample(self, count: int, seed: int = 0, low_discrepancy: bool = False):
        """Draw ``count`` points from the inset box.

        ``low_discrepancy`` switches from uniform pseudo-random points to a
        scrambled Halton sequence with the same seed.
        """
        if count < 1:
            raise ValueError("count must be >= 1")
        if not self.bounded:
            raise ValueError("cannot sample an unbounded domain")
        lo, hi = self.inset_bounds()
        if low_discrepancy:
            unit = qmc.Halton(d=self.n, scramble=True, seed=seed).random(count)
        else:
            unit = np.random.default_rng(seed).random((count, self.n))
        return lo + unit * (hi - lo)

    def with_margin(self, margin):
        return Domain(self.lower, self.upper, margin)
