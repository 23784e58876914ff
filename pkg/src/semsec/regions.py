"""Result containers shared by the Gaussian and binary region evaluators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np

from .errors import DomainError

__all__ = [
    "EquivocationCaps",
    "MinRateResult",
    "RegionSurface",
    "TradeoffCurve",
]


@dataclass(frozen=True)
class EquivocationCaps:
    """Equivocation upper bounds at a fixed operating point.

    ``delta_s`` / ``delta_u`` / ``delta_su`` are the operative caps, clamped
    at the unconditional entropy of the corresponding source component.
    ``raw_*`` carry the unclamped formula values (which may exceed the
    entropy, e.g. for large channel-use ratios or key rates); ``capped_*``
    flag where the clamp fired. Iterating yields the three clamped caps.
    """

    delta_s: float
    delta_u: float
    delta_su: float
    raw_delta_s: float
    raw_delta_u: float
    raw_delta_su: float
    capped_s: bool
    capped_u: bool
    capped_su: bool

    def __iter__(self) -> Iterator[float]:
        return iter((self.delta_s, self.delta_u, self.delta_su))

    @classmethod
    def from_raw(cls, raw_s: float, raw_u: float, raw_su: float,
                 cap_s: float, cap_u: float, cap_su: float) -> "EquivocationCaps":
        return cls(
            delta_s=min(raw_s, cap_s),
            delta_u=min(raw_u, cap_u),
            delta_su=min(raw_su, cap_su),
            raw_delta_s=raw_s,
            raw_delta_u=raw_u,
            raw_delta_su=raw_su,
            capped_s=raw_s > cap_s,
            capped_u=raw_u > cap_u,
            capped_su=raw_su > cap_su,
        )


@dataclass(frozen=True)
class MinRateResult:
    """Minimal channel-use ratio, or an infeasibility verdict with a reason.

    ``binding`` names the constraint that determined the minimum (one of
    "rate", "delta_s", "delta_u", "delta_su") when feasible.
    """

    r_min: float | None
    feasible: bool
    reason: str | None = None
    binding: str | None = None

    def __post_init__(self):
        if self.feasible:
            if self.r_min is None or not math.isfinite(self.r_min) or self.r_min < 0:
                raise DomainError(
                    f"feasible result requires a finite nonnegative r_min, got {self.r_min}"
                )
        elif self.r_min is not None:
            raise DomainError("infeasible result must not carry an r_min value")

    def value(self) -> float:
        if not self.feasible:
            raise DomainError(f"no minimal ratio: infeasible ({self.reason})")
        return float(self.r_min)


@dataclass(frozen=True)
class RegionSurface:
    """A (D_s, D_u) grid of minimal channel-use ratios (or maximal equivocations).

    ``axes`` maps axis names to bucket-center coordinate arrays. ``values``
    holds the per-cell value where ``feasible`` is True and NaN elsewhere
    (value present exactly when the cell is feasible). ``capped`` flags
    entropy-cap activity; ``samples`` counts contributing Monte-Carlo samples
    (0 for closed-form surfaces). ``metadata`` echoes the run configuration,
    seed, and artifact version.
    """

    axes: dict[str, np.ndarray]
    values: np.ndarray
    feasible: np.ndarray
    capped: np.ndarray
    samples: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        feasible = np.asarray(self.feasible, dtype=bool)
        capped = np.asarray(self.capped, dtype=bool)
        samples = np.asarray(self.samples, dtype=int)
        if not (values.shape == feasible.shape == capped.shape == samples.shape):
            raise DomainError("surface component shapes disagree")
        if np.any(~np.isfinite(values[feasible])):
            raise DomainError("feasible cells must carry finite values")
        if np.any(np.isfinite(values[~feasible])):
            raise DomainError("infeasible cells must not carry values")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "feasible", feasible)
        object.__setattr__(self, "capped", capped)
        object.__setattr__(self, "samples", samples)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def rows(self):
        """Yield per-cell dicts in deterministic row-major order."""
        names = list(self.axes)
        grids = [np.asarray(self.axes[n], dtype=float) for n in names]
        it = np.ndindex(*self.values.shape)
        for idx in it:
            row = {name: float(grids[d][idx[d]]) for d, name in enumerate(names)}
            row.update(
                value=(float(self.values[idx]) if self.feasible[idx] else None),
                feasible=bool(self.feasible[idx]),
                capped=bool(self.capped[idx]),
                samples=int(self.samples[idx]),
            )
            yield row


@dataclass(frozen=True)
class TradeoffCurve:
    """A fidelity-secrecy trade-off curve Delta_s(D_s) at fixed (r, D_u, R_k).

    ``delta_s_max`` is entropy-clamped; ``raw`` is the unclamped bound;
    ``capped`` flags the clamp; ``d_s_star`` is the smallest grid distortion
    at which the cap fires (None if it never does).
    """

    d_s: np.ndarray
    delta_s_max: np.ndarray
    raw: np.ndarray
    capped: np.ndarray
    d_s_star: float | None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        d_s = np.asarray(self.d_s, dtype=float)
        if not (d_s.shape == np.shape(self.delta_s_max) == np.shape(self.raw) == np.shape(self.capped)):
            raise DomainError("curve component shapes disagree")

    def rows(self):
        for i in range(len(self.d_s)):
            yield {
                "D_s": float(self.d_s[i]),
                "delta_s_max": float(self.delta_s_max[i]),
                "capped": bool(self.capped[i]),
            }
