"""Binary system model: doubly symmetric source over a cascaded BSC wiretap
channel, with closed-form converse caps and the semantic tradeoff curve.

Model summary. The observation U is uniform Bernoulli and the semantic
component S is U passed through a bit-flip channel with crossover alpha, so
(S, U) is doubly symmetric. The legitimate link is a BSC with crossover
eps1 and the eavesdropper sees a further cascade with crossover eps2
(overall crossover eps1 * eps2 in the star-convolution sense). Hamming
distortion on both components; time-sharing parameter gamma in [0, 1]
(gamma = 0 gives the strongest secrecy term and is always a valid choice).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InfeasibleError
from .info import binary_entropy, star
from .rdf import binary_rdf_joint, binary_rdf_obs, binary_rdf_sem
from .regions import EquivocationCaps, MinRateResult, TradeoffCurve
from .gaussian import DISABLED, EquivocationTargets

__all__ = [
    "SemanticSourceBinary",
    "WiretapChannelBinary",
    "binary_secrecy_term",
    "binary_converse_caps",
    "binary_min_r",
    "delta_s_curve",
]


@dataclass(frozen=True)
class SemanticSourceBinary:
    """Doubly symmetric binary source: S = U xor Bernoulli(alpha)."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 0.5:
            raise DomainError(f"alpha must lie in [0, 1/2], got {self.alpha}")

    @property
    def h_s(self) -> float:
        return 1.0

    @property
    def h_u(self) -> float:
        return 1.0

    @property
    def h_su(self) -> float:
        return 1.0 + binary_entropy(self.alpha)

    @property
    def h_alpha(self) -> float:
        return binary_entropy(self.alpha)


@dataclass(frozen=True)
class WiretapChannelBinary:
    """Cascade of two BSCs: legitimate crossover eps1, extra leg eps2."""

    eps1: float
    eps2: float

    def __post_init__(self):
        for name, val in (("eps1", self.eps1), ("eps2", self.eps2)):
            if not 0.0 <= val <= 0.5:
                raise DomainError(f"{name} must lie in [0, 1/2], got {val}")

    @property
    def eps_z(self) -> float:
        """Effective eavesdropper crossover (star convolution of the legs)."""
        return star(self.eps1, self.eps2)

    @property
    def capacity_main(self) -> float:
        return 1.0 - binary_entropy(self.eps1)


def binary_secrecy_term(ch: WiretapChannelBinary, gamma: float) -> float:
    """Entropy gap between the eavesdropper and legitimate observations.

    Equals H_b(gamma * eps1 * eps2) - H_b(gamma * eps1) in star-convolution
    notation. Nonnegative, maximal at gamma = 0, and zero when the extra
    leg is noiseless (eps2 = 0) or gamma = 1/2.
    """
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma}")
    p_z = star(gamma, ch.eps_z)
    p_y = star(gamma, ch.eps1)
    return float(binary_entropy(p_z) - binary_entropy(p_y))


def _resolve_gamma2(case: int, gamma2: float | None) -> float:
    if case == 1:
        if gamma2 is not None and gamma2 != 0.0:
            raise DomainError("case 1 fixes the observation-side gamma at 0")
        return 0.0
    return 0.0 if gamma2 is None else gamma2


def binary_converse_caps(
    src: SemanticSourceBinary,
    ch: WiretapChannelBinary,
    target_s: float,
    target_u: float,
    r: float,
    R_k: float = 0.0,
    gamma1: float = 0.0,
    gamma2: float | None = None,
    case: int = 2,
) -> EquivocationCaps:
    """Equivocation upper bounds for the binary model.

    Raw bounds follow the closed-form expressions (the observation bound
    uses the conditional entropy H_b(alpha) as its entropy term); each is
    additionally clamped at the unconditional entropy of its component —
    1 bit for S, 1 bit for U, 1 + H_b(alpha) bits jointly.
    """
    if r < 0.0:
        raise DomainError(f"channel-use ratio must be nonnegative, got {r}")
    if R_k < 0.0:
        raise DomainError(f"key rate must be nonnegative, got {R_k}")
    if case not in (1, 2):
        raise DomainError(f"case must be 1 or 2, got {case}")
    gamma2 = _resolve_gamma2(case, gamma2)
    r_s = binary_rdf_sem(src.alpha, target_s, case)
    if math.isinf(r_s):
        raise InfeasibleError(
            f"restricted encoder cannot reach semantic distortion {target_s} "
            f"< alpha {src.alpha}"
        )
    r_u = binary_rdf_obs(src.alpha, target_u)
    r_j = binary_rdf_joint(src.alpha, target_s, target_u, case)
    raw_s = R_k + r * binary_secrecy_term(ch, gamma1) + 1.0 - r_s
    raw_u = R_k + r * binary_secrecy_term(ch, gamma2) + src.h_alpha - r_u
    raw_su = R_k + r * binary_secrecy_term(ch, 0.0) + src.h_alpha + 1.0 - r_j
    return EquivocationCaps.from_raw(
        raw_s, raw_u, raw_su, src.h_s, src.h_u, src.h_su
    )


def binary_min_r(
    src: SemanticSourceBinary,
    ch: WiretapChannelBinary,
    target_s: float,
    target_u: float,
    targets: EquivocationTargets,
    gamma1: float = 0.0,
    gamma2: float | None = None,
    case: int = 2,
) -> MinRateResult:
    """Minimal channel-use ratio compatible with the binary converse bound.

    Maximum of the joint-RDF-over-capacity bound and the secrecy-driven
    bound of every enabled equivocation target not already met at r = 0.
    """
    if case not in (1, 2):
        raise DomainError(f"case must be 1 or 2, got {case}")
    gamma2 = _resolve_gamma2(case, gamma2)
    try:
        r_s = binary_rdf_sem(src.alpha, target_s, case)
        if math.isinf(r_s):
            raise InfeasibleError(
                f"restricted encoder cannot reach semantic distortion {target_s} "
                f"< alpha {src.alpha}"
            )
        r_u = binary_rdf_obs(src.alpha, target_u)
        r_j = binary_rdf_joint(src.alpha, target_s, target_u, case)
    except InfeasibleError as exc:
        return MinRateResult(None, False, reason=f"distortion_infeasible: {exc}")
    cap = ch.capacity_main
    if r_j > 0.0 and cap <= 0.0:
        return MinRateResult(None, False, reason="rate_infeasible")
    r_min = r_j / cap if r_j > 0.0 else 0.0
    binding = "rate"
    components = (
        ("delta_s", targets.delta_s, 1.0, r_s, gamma1),
        ("delta_u", targets.delta_u, src.h_alpha, r_u, gamma2),
        ("delta_su", targets.delta_su, src.h_alpha + 1.0, r_j, 0.0),
    )
    for name, tgt, h_term, rdf, gamma in components:
        if tgt == DISABLED:
            continue
        need = tgt - (targets.R_k + h_term - rdf)
        if need <= 0.0:
            continue
        slope = binary_secrecy_term(ch, gamma)
        if slope <= 0.0:
            return MinRateResult(None, False, reason=f"secrecy_infeasible_{name}")
        cand = need / slope
        if cand > r_min:
            r_min = cand
            binding = name
    return MinRateResult(r_min, True, binding=binding)


def delta_s_curve(
    src: SemanticSourceBinary,
    ch: WiretapChannelBinary,
    r: float,
    R_k: float = 0.0,
    case: int = 1,
    d_s_grid: Sequence[float] | None = None,
    gamma1: float = 0.0,
    metadata: dict | None = None,
) -> TradeoffCurve:
    """Semantic equivocation cap as a function of the distortion budget.

    Sweeps D_s at fixed (r, R_k); the raw cap rises with D_s until it hits
    the one-bit entropy ceiling at the saturation distortion, beyond which
    the clamped curve is exactly flat. The default grid spans the feasible
    range for the requested case (starting just above alpha for the
    restricted encoder) with 200 points.
    """
    if r < 0.0:
        raise DomainError(f"channel-use ratio must be nonnegative, got {r}")
    if R_k < 0.0:
        raise DomainError(f"key rate must be nonnegative, got {R_k}")
    if case not in (1, 2):
        raise DomainError(f"case must be 1 or 2, got {case}")
    if d_s_grid is None:
        lo = src.alpha + 1e-4 if case == 1 else 1e-4
        d_s_grid = np.linspace(lo, 0.5, 200)
    grid = np.asarray(d_s_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 1 or np.any(np.diff(grid) <= 0):
        raise DomainError("D_s grid must be one-dimensional and strictly increasing")
    if grid[0] <= 0.0:
        raise DomainError("distortions must be positive")
    if case == 1 and grid[0] <= src.alpha:
        raise DomainError(
            f"case-1 grid must start above the distortion floor alpha = {src.alpha}"
        )
    slope = binary_secrecy_term(ch, gamma1)
    raw = np.empty(len(grid))
    for i, d_s in enumerate(grid):
        raw[i] = R_k + r * slope + 1.0 - binary_rdf_sem(src.alpha, float(d_s), case)
    clamped = np.minimum(raw, 1.0)
    capped = raw > 1.0
    star_idx = np.flatnonzero(capped)
    d_s_star = float(grid[star_idx[0]]) if star_idx.size else None
    meta = {
        "kind": "delta_s_curve",
        "case": case,
        "r": r,
        "R_k": R_k,
        "gamma1": gamma1,
        "alpha": src.alpha,
        "eps1": ch.eps1,
        "eps2": ch.eps2,
    }
    if metadata:
        meta.update(metadata)
    return TradeoffCurve(
        d_s=grid,
        delta_s_max=clamped,
        raw=raw,
        capped=capped,
        d_s_star=d_s_star,
        metadata=meta,
    )
