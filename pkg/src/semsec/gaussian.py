"""Gaussian system model: closed-form RDFs, converse caps, and the
Monte-Carlo inner-bound scan.

Model summary. A jointly Gaussian semantic source (S, U) with covariance
block K = [[P_s, P_su], [P_su, P_u]] is conveyed over a degraded Gaussian
wiretap channel (input power P, legitimate noise P_N1, eavesdropper noise
P_N = P_N1 + P_N2) using r channel symbols per source symbol. The encoder
sees only U (case 1) or both components (case 2).

The converse evaluator uses closed-form rate-distortion functions and the
secrecy-capacity term; the inner-bound evaluator draws jointly Gaussian
auxiliary structures for the source side (6x6 covariance over
S, U, Sc, Sp, Uc, Up) and the channel side (7x7 covariance over
Wc, Wu, Qs, Qu, X, Y, Z), evaluates every information term in closed form,
and solves the piecewise-linear system for the minimal feasible r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InfeasibleError, SamplerStarvationError
from .info import LN2, TWO_PI_E, CovMatrix
from .regions import EquivocationCaps, MinRateResult, RegionSurface

__all__ = [
    "SemanticSourceGaussian",
    "WiretapChannelGaussian",
    "EquivocationTargets",
    "InnerSample",
    "DISABLED",
    "gaussian_rdf_obs",
    "gaussian_rdf_sem",
    "gaussian_rdf_joint",
    "secrecy_term",
    "converse_equivocation_caps",
    "converse_min_r",
    "converse_surface",
    "sample_sigma1",
    "sample_sigma2",
    "inner_min_r",
    "inner_bound_scan",
    "draw_inner_samples",
    "SIGMA1_LABELS",
    "SIGMA2_LABELS",
    "REASON_NAMES",
]

_TOL = 1e-9
_TINY = 1e-300

#: Sentinel for a disabled equivocation target.
DISABLED = float("-inf")

SIGMA1_LABELS = ("S", "U", "Sc", "Sp", "Uc", "Up")
SIGMA2_LABELS = ("Wc", "Wu", "Qs", "Qu", "X", "Y", "Z")

#: Per-sample discard reason codes for the inner-bound evaluation.
REASON_NAMES = {
    0: "ok",
    1: "public_rate",
    2: "common_rate",
    3: "private_rate",
    4: "secrecy_s",
    5: "secrecy_u",
    6: "secrecy_su",
    7: "unsound_s",
    8: "unsound_u",
    9: "unsound_su",
    10: "degenerate",
    11: "not_psd",
}


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SemanticSourceGaussian:
    """Zero-mean jointly Gaussian semantic source with covariance block K."""

    P_s: float
    P_u: float
    P_su: float

    def __post_init__(self):
        if not (self.P_s > 0.0 and self.P_u > 0.0):
            raise DomainError(f"variances must be positive, got ({self.P_s}, {self.P_u})")
        if self.det_k < -1e-12:
            raise DomainError(
                f"covariance block not PSD: determinant {self.det_k} < 0"
            )

    @property
    def det_k(self) -> float:
        return self.P_s * self.P_u - self.P_su**2

    @property
    def rho2(self) -> float:
        """Squared Pearson correlation between the two components."""
        return min(self.P_su**2 / (self.P_s * self.P_u), 1.0)

    @property
    def K(self) -> np.ndarray:
        return np.array([[self.P_s, self.P_su], [self.P_su, self.P_u]])

    @property
    def h_s(self) -> float:
        return 0.5 * math.log2(TWO_PI_E * self.P_s)

    @property
    def h_u(self) -> float:
        return 0.5 * math.log2(TWO_PI_E * self.P_u)

    @property
    def h_su(self) -> float:
        det = max(self.det_k, 0.0)
        if det == 0.0:
            return float("-inf")
        return math.log2(TWO_PI_E) + 0.5 * math.log2(det)

    def cholesky(self) -> np.ndarray:
        """Lower-triangular factor of K (valid also for a singular block)."""
        l00 = math.sqrt(self.P_s)
        l10 = self.P_su / l00
        l11 = math.sqrt(max(self.P_u - l10**2, 0.0))
        return np.array([[l00, 0.0], [l10, l11]])


@dataclass(frozen=True)
class WiretapChannelGaussian:
    """Degraded Gaussian wiretap channel: Y = X + N1, Z = Y + N2."""

    P: float
    P_N1: float
    P_N2: float

    def __post_init__(self):
        if not (self.P > 0.0 and self.P_N1 > 0.0 and self.P_N2 >= 0.0):
            raise DomainError(
                f"need P > 0, P_N1 > 0, P_N2 >= 0; got ({self.P}, {self.P_N1}, {self.P_N2})"
            )

    @property
    def P_N(self) -> float:
        return self.P_N1 + self.P_N2

    @property
    def capacity_main(self) -> float:
        return 0.5 * math.log2(1.0 + self.P / self.P_N1)

    def channel_block(self) -> np.ndarray:
        p, n1, n = self.P, self.P_N1, self.P_N
        return np.array([[p, p, p], [p, p + n1, p + n1], [p, p + n1, p + n]])


@dataclass(frozen=True)
class EquivocationTargets:
    """Secrecy thresholds (bits) plus the shared-key rate.

    A target of ``-inf`` (the :data:`DISABLED` sentinel) disables that
    constraint entirely; finite targets may be negative (differential
    equivocations can be). ``+inf`` and NaN are rejected.
    """

    delta_s: float
    delta_u: float
    delta_su: float
    R_k: float = 0.0

    def __post_init__(self):
        for name, val in (("delta_s", self.delta_s), ("delta_u", self.delta_u),
                          ("delta_su", self.delta_su)):
            if math.isnan(val) or val == float("inf"):
                raise DomainError(f"{name} must be finite or -inf, got {val}")
        if math.isnan(self.R_k) or not (0.0 <= self.R_k < float("inf")):
            raise DomainError(f"R_k must be finite and nonnegative, got {self.R_k}")

    @classmethod
    def no_secrecy(cls, R_k: float = 0.0) -> "EquivocationTargets":
        return cls(DISABLED, DISABLED, DISABLED, R_k)

    def active(self) -> tuple[str, ...]:
        return tuple(
            name
            for name, val in (("delta_s", self.delta_s), ("delta_u", self.delta_u),
                              ("delta_su", self.delta_su))
            if val != DISABLED
        )


@dataclass(frozen=True)
class InnerSample:
    """One Monte-Carlo draw of the inner-bound auxiliary structure."""

    sigma1: CovMatrix
    sigma2: CovMatrix
    case: int
    d_s: float
    d_u: float
    r_min: float | None = None
    feasible: bool | None = None
    reason: str | None = None

    @classmethod
    def from_covariances(cls, sigma1: CovMatrix, sigma2: CovMatrix, case: int) -> "InnerSample":
        if case not in (1, 2):
            raise DomainError(f"case must be 1 or 2, got {case}")
        if sigma1.dim != 6 or sigma2.dim != 7:
            raise DomainError("need a 6x6 source-side and a 7x7 channel-side covariance")
        t = _inner_terms(sigma1.entries[None], sigma2.entries[None], case)
        return cls(sigma1, sigma2, case, float(t["d_s"][0]), float(t["d_u"][0]))


# ---------------------------------------------------------------------------
# closed-form rate-distortion functions
# ---------------------------------------------------------------------------


def _log2_plus(x: float) -> float:
    """max(0, log2 x); nonpositive arguments mean a slack constraint (0)."""
    if x <= 1.0:
        return 0.0
    return math.log2(x)


def gaussian_rdf_obs(src: SemanticSourceGaussian, target_u: float) -> float:
    """Observation-part RDF: half log-plus of P_u over the distortion."""
    if target_u <= 0.0:
        raise DomainError(f"distortion must be positive, got {target_u}")
    return 0.5 * _log2_plus(src.P_u / target_u)


def gaussian_rdf_sem(src: SemanticSourceGaussian, target_s: float, case: int) -> float:
    """Semantic-part RDF.

    Case 2 (direct access): half log-plus of P_s over the distortion.
    Case 1 (access through U only): feasible only above the residual floor
    (1 - rho^2) P_s, where the rate is driven by the explainable variance.
    """
    if target_s <= 0.0:
        raise DomainError(f"distortion must be positive, got {target_s}")
    if case == 2:
        return 0.5 * _log2_plus(src.P_s / target_s)
    if case == 1:
        floor = (1.0 - src.rho2) * src.P_s
        if target_s <= floor:
            raise InfeasibleError(
                f"restricted encoder cannot reach semantic distortion {target_s} "
                f"<= floor {floor}"
            )
        return 0.5 * _log2_plus(src.rho2 * src.P_s / (target_s - floor))
    raise DomainError(f"case must be 1 or 2, got {case}")


def gaussian_rdf_joint(
    src: SemanticSourceGaussian, target_s: float, target_u: float, case: int
) -> float:
    """Joint RDF under both distortion constraints.

    Case 1 is the maximum of the two marginal RDFs. Case 2 selects among
    four regimes depending on which constraints are active: semantic-
    dominant, observation-dominant, weak-correlation product form, and the
    intermediate form with the correlation correction term. The deficit
    terms clamp at zero when a distortion exceeds the component variance.
    """
    if target_s <= 0.0 or target_u <= 0.0:
        raise DomainError("distortions must be positive")
    if case == 1:
        return max(
            gaussian_rdf_obs(src, target_u), gaussian_rdf_sem(src, target_s, 1)
        )
    if case != 2:
        raise DomainError(f"case must be 1 or 2, got {case}")
    ps, pu, rho2 = src.P_s, src.P_u, src.rho2
    det_k = max(src.det_k, 0.0)
    dhs = max(ps - target_s, 0.0)
    dhu = max(pu - target_u, 0.0)
    if dhs > 0.0 and rho2 * dhs * pu > dhu * ps:
        return 0.5 * _log2_plus(ps / target_s)
    if dhu > 0.0 and rho2 * dhu * ps >= dhs * pu:
        return 0.5 * _log2_plus(pu / target_u)
    if rho2 * ps * pu < dhs * dhu:
        return 0.5 * _log2_plus(det_k / (target_s * target_u))
    corr = (math.sqrt(rho2 * ps * pu) - math.sqrt(dhs * dhu)) ** 2
    denom = target_s * target_u - corr
    if denom <= 0.0:
        raise DomainError(
            f"joint-RDF regime selection degenerate at ({target_s}, {target_u})"
        )
    return 0.5 * _log2_plus(det_k / denom)


# ---------------------------------------------------------------------------
# converse bound
# ---------------------------------------------------------------------------


def secrecy_term(ch: WiretapChannelGaussian, beta: float) -> float:
    """Half the log-ratio gap between the legitimate and eavesdropper SNRs.

    Nondecreasing in beta on [0, 1]; zero when the eavesdropper sees the
    same noise as the legitimate receiver (P_N2 = 0).
    """
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    p_eff = beta * ch.P
    return 0.5 * (
        math.log2(1.0 + p_eff / ch.P_N1) - math.log2(1.0 + p_eff / ch.P_N)
    )


def _resolve_beta2(case: int, beta2: float | None) -> float:
    if case == 1:
        if beta2 is not None and beta2 != 1.0:
            raise DomainError("case 1 fixes the observation-side beta at 1")
        return 1.0
    return 1.0 if beta2 is None else beta2


def converse_equivocation_caps(
    src: SemanticSourceGaussian,
    ch: WiretapChannelGaussian,
    target_s: float,
    target_u: float,
    r: float,
    R_k: float = 0.0,
    beta1: float = 1.0,
    beta2: float | None = None,
    case: int = 2,
) -> EquivocationCaps:
    """Equivocation upper bounds at channel-use ratio ``r`` and key rate ``R_k``.

    Each bound is the key rate plus ``r`` times a secrecy term plus the
    source-component entropy minus the matching RDF; each is additionally
    clamped at the unconditional component entropy (see
    :class:`EquivocationCaps` for both values and the clamp flags).
    Infeasible distortions propagate as :class:`InfeasibleError`.
    """
    if r < 0.0:
        raise DomainError(f"channel-use ratio must be nonnegative, got {r}")
    if R_k < 0.0:
        raise DomainError(f"key rate must be nonnegative, got {R_k}")
    if case not in (1, 2):
        raise DomainError(f"case must be 1 or 2, got {case}")
    beta2 = _resolve_beta2(case, beta2)
    r_s = gaussian_rdf_sem(src, target_s, case)
    r_u = gaussian_rdf_obs(src, target_u)
    r_j = gaussian_rdf_joint(src, target_s, target_u, case)
    raw_s = R_k + r * secrecy_term(ch, beta1) + src.h_s - r_s
    raw_u = R_k + r * secrecy_term(ch, beta2) + src.h_u - r_u
    raw_su = R_k + r * secrecy_term(ch, 1.0) + src.h_su - r_j
    return EquivocationCaps.from_raw(raw_s, raw_u, raw_su, src.h_s, src.h_u, src.h_su)


def converse_min_r(
    src: SemanticSourceGaussian,
    ch: WiretapChannelGaussian,
    target_s: float,
    target_u: float,
    targets: EquivocationTargets,
    beta1: float = 1.0,
    beta2: float | None = None,
    case: int = 2,
) -> MinRateResult:
    """Minimal channel-use ratio compatible with the converse bound.

    The maximum of the rate-driven bound (joint RDF over main-channel
    capacity) and, for each enabled equivocation target not already met at
    r = 0, the secrecy-driven bound. Infeasible when an unmet target has a
    zero secrecy slope, or when the distortion pair itself is infeasible.
    """
    if case not in (1, 2):
        raise DomainError(f"case must be 1 or 2, got {case}")
    beta2 = _resolve_beta2(case, beta2)
    try:
        r_s = gaussian_rdf_sem(src, target_s, case)
        r_u = gaussian_rdf_obs(src, target_u)
        r_j = gaussian_rdf_joint(src, target_s, target_u, case)
    except InfeasibleError as exc:
        return MinRateResult(None, False, reason=f"distortion_infeasible: {exc}")
    r_min = r_j / ch.capacity_main
    binding = "rate"
    components = (
        ("delta_s", targets.delta_s, src.h_s, r_s, beta1),
        ("delta_u", targets.delta_u, src.h_u, r_u, beta2),
        ("delta_su", targets.delta_su, src.h_su, r_j, 1.0),
    )
    for name, tgt, h_comp, rdf, beta in components:
        if tgt == DISABLED:
            continue
        need = tgt - (targets.R_k + h_comp - rdf)
        if need <= 0.0:
            continue  # already met at r = 0
        slope = secrecy_term(ch, beta)
        if slope <= 0.0:
            return MinRateResult(None, False, reason=f"secrecy_infeasible_{name}")
        cand = need / slope
        if cand > r_min:
            r_min = cand
            binding = name
    return MinRateResult(r_min, True, binding=binding)


def converse_surface(
    src: SemanticSourceGaussian,
    ch: WiretapChannelGaussian,
    targets: EquivocationTargets,
    case: int,
    d_s_grid: Sequence[float],
    d_u_grid: Sequence[float],
    beta1: float = 1.0,
    beta2: float | None = None,
    metadata: dict | None = None,
) -> RegionSurface:
    """Evaluate :func:`converse_min_r` over a (D_s, D_u) grid."""
    d_s_grid = np.asarray(d_s_grid, dtype=float)
    d_u_grid = np.asarray(d_u_grid, dtype=float)
    shape = (len(d_s_grid), len(d_u_grid))
    values = np.full(shape, np.nan)
    feasible = np.zeros(shape, dtype=bool)
    for i, d_s in enumerate(d_s_grid):
        for j, d_u in enumerate(d_u_grid):
            res = converse_min_r(src, ch, float(d_s), float(d_u), targets, beta1, beta2, case)
            if res.feasible:
                values[i, j] = res.r_min
                feasible[i, j] = True
    meta = {
        "kind": "converse",
        "case": case,
        "targets": {
            "delta_s": targets.delta_s,
            "delta_u": targets.delta_u,
            "delta_su": targets.delta_su,
            "R_k": targets.R_k,
        },
    }
    if metadata:
        meta.update(metadata)
    return RegionSurface(
        axes={"D_s": d_s_grid, "D_u": d_u_grid},
        values=values,
        feasible=feasible,
        capped=np.zeros(shape, dtype=bool),
        samples=np.zeros(shape, dtype=int),
        metadata=meta,
    )


# ---------------------------------------------------------------------------
# inner bound: auxiliary-structure sampler
# ---------------------------------------------------------------------------

_CHUNK = 4096
_MODE_PROBS = (0.4, 0.2, 0.2, 0.2)
_REJECTION_BUDGET = 100_000


def _sample_sigma1_batch(src: SemanticSourceGaussian, case: int, n: int, rng) -> np.ndarray:
    """Draw ``n`` source-side factor structures; returns (n, 6, 6).

    Coordinates: (S, U, Sc, Sp, Uc, Up). Factor dimensions: 0-1 span the
    (S, U) plane, 2 is the common-layer noise (shared with the observation
    side), 3 is private to Sp, 4-5 are private to the observation side. The
    disjoint noise supports make the observation-side auxiliaries
    conditionally independent of Sp given (Sc, source plane) for every draw,
    which keeps the draws within the achievable-scheme family. A mixture of
    four modes covers the region: general draws plus three corner modes
    (layered-efficient, semantic-only, observation-only) that land near the
    rate-optimal boundary.
    """
    l = src.cholesky()
    amp = math.sqrt(max(src.P_s, src.P_u))
    g = np.zeros((n, 6, 6))
    g[:, 0, :2] = l[0]
    g[:, 1, :2] = l[1]
    sem_dir = l[0] if case == 2 else l[1]

    mode = rng.choice(4, size=n, p=_MODE_PROBS)
    idx0 = np.flatnonzero(mode == 0)
    idx1 = np.flatnonzero(mode == 1)
    idx2 = np.flatnonzero(mode == 2)
    idx3 = np.flatnonzero(mode == 3)

    def _noise(size, lo=1e-2, hi=2.0, scale=amp):
        return np.exp(rng.uniform(math.log(lo), math.log(hi), size)) * scale

    if idx0.size:
        k = idx0.size
        g[np.ix_(idx0, [2, 3, 4, 5], [0, 1])] = rng.uniform(-1.5, 1.5, (k, 4, 2)) * amp
        g[idx0, 2, 2] = _noise(k)
        g[idx0, 3, 3] = _noise(k)
        g[idx0, 4, 4] = _noise(k)
        g[idx0, 5, 5] = _noise(k)
        signs = rng.choice([-1.0, 1.0], size=(k, 4))
        g[idx0, 4, 2] = signs[:, 0] * _noise(k)
        g[idx0, 5, 2] = signs[:, 1] * _noise(k)
        g[idx0, 4, 5] = signs[:, 2] * _noise(k)
        g[idx0, 5, 4] = signs[:, 3] * _noise(k)
    if idx1.size:
        k = idx1.size
        g[np.ix_(idx1, [2], [0, 1])] = (rng.uniform(-1.0, 1.0, (k, 1, 2))) * amp
        g[idx1, 3, :2] = sem_dir
        g[idx1, 4, :2] = l[1]
        g[idx1, 5, :2] = l[1]
        sig = np.exp(rng.uniform(math.log(3e-2), math.log(3.0), (k, 4)))
        g[idx1, 2, 2] = sig[:, 0]
        g[idx1, 3, 3] = sig[:, 1]
        g[idx1, 4, 4] = sig[:, 2]
        g[idx1, 5, 5] = sig[:, 3]
    if idx2.size:
        k = idx2.size
        g[idx2, 2, 2] = 1.0
        g[idx2, 3, :2] = sem_dir
        g[idx2, 3, 3] = np.exp(rng.uniform(math.log(3e-2), math.log(3.0), k))
        g[idx2, 4, 4] = 1.0
        g[idx2, 5, 5] = 1.0
    if idx3.size:
        k = idx3.size
        g[idx3, 2, 2] = 1.0
        g[idx3, 3, 3] = 1.0
        g[idx3, 4, :2] = l[1]
        g[idx3, 5, :2] = l[1]
        sig = np.exp(rng.uniform(math.log(3e-2), math.log(3.0), (k, 2)))
        g[idx3, 4, 4] = sig[:, 0]
        g[idx3, 5, 5] = sig[:, 1]

    if case == 1:
        # Restricted encoder: auxiliaries may depend on the source only
        # through U, so project their source-plane loadings onto the U row.
        w = l[1] / np.linalg.norm(l[1])
        proj = g[:, 2:, :2] @ w
        g[:, 2:, :2] = proj[..., None] * w[None, None, :]

    s1 = g @ g.transpose(0, 2, 1)
    s1[:, :2, :2] = src.K  # exact source block
    return s1


def _stick_rest(rng, k: int, parts: int) -> np.ndarray:
    """Uniform split of 1 into ``parts`` nonnegative shares, k times."""
    return rng.dirichlet(np.ones(parts), size=k)


def _sample_sigma2_batch(ch: WiretapChannelGaussian, n: int, rng) -> np.ndarray:
    """Draw ``n`` channel-side layer structures; returns (n, 7, 7).

    Coordinates: (Wc, Wu, Qs, Qu, X, Y, Z). Each auxiliary layer carries an
    independent signal component; X sums the signals plus an independent
    residual that tops the input power up to P exactly, so the (X, Y, Z)
    block is the fixed channel block for every draw and each auxiliary is
    conditionally independent of (Y, Z) given X. Four modes: general
    stick-breaking splits with private noises, a clean full-power split, and
    two corner-heavy splits that favor the confidential layers.
    """
    p, n1, ntot = ch.P, ch.P_N1, ch.P_N
    mode = rng.choice(4, size=n, p=_MODE_PROBS)
    shares = np.zeros((n, 4))
    noise = np.zeros((n, 4))

    idx0 = np.flatnonzero(mode == 0)
    idx1 = np.flatnonzero(mode == 1)
    idx2 = np.flatnonzero(mode == 2)
    idx3 = np.flatnonzero(mode == 3)
    if idx0.size:
        k = idx0.size
        total = rng.uniform(0.0, 1.0, k)
        shares[idx0] = _stick_rest(rng, k, 4) * total[:, None]
        noise[idx0] = rng.uniform(0.0, 1.0, (k, 4)) * math.sqrt(p)
    if idx1.size:
        shares[idx1] = _stick_rest(rng, idx1.size, 4)
    if idx2.size:
        k = idx2.size
        v_wc = rng.uniform(0.0, 0.1, k)
        rest = 1.0 - v_wc
        v_qs = rest * (0.85 + 0.15 * rng.uniform(0.0, 1.0, k))
        rem = rest - v_qs
        t = rng.uniform(0.0, 1.0, k)
        shares[idx2, 0] = v_wc
        shares[idx2, 2] = v_qs
        shares[idx2, 1] = rem * t
        shares[idx2, 3] = rem * (1.0 - t)
    if idx3.size:
        k = idx3.size
        v_wu = 0.7 + 0.3 * rng.uniform(0.0, 1.0, k)
        rest3 = _stick_rest(rng, k, 3) * (1.0 - v_wu)[:, None]
        shares[idx3, 1] = v_wu
        shares[idx3, 0] = rest3[:, 0]
        shares[idx3, 2] = rest3[:, 1]
        shares[idx3, 3] = rest3[:, 2]

    sig = np.sqrt(np.clip(shares, 0.0, None) * p)
    g2 = np.zeros((n, 5, 9))
    for layer in range(4):
        g2[:, layer, 1 + layer] = sig[:, layer]
        g2[:, layer, 5 + layer] = noise[:, layer]
    g2[:, 4, 1:5] = sig
    g2[:, 4, 0] = np.sqrt(np.maximum(p - (sig**2).sum(axis=1), 0.0))
    s5 = g2 @ g2.transpose(0, 2, 1)
    s5[:, 4, 4] = p  # exact input power

    s2 = np.zeros((n, 7, 7))
    s2[:, :5, :5] = s5
    # Auxiliaries relate to Y and Z exactly as they relate to X (the channel
    # only adds independent noise), and the (X, Y, Z) block is fixed.
    s2[:, :4, 5] = s5[:, :4, 4]
    s2[:, 5, :4] = s5[:, 4, :4]
    s2[:, :4, 6] = s5[:, :4, 4]
    s2[:, 6, :4] = s5[:, 4, :4]
    s2[:, 4, 5] = s2[:, 5, 4] = p
    s2[:, 4, 6] = s2[:, 6, 4] = p
    s2[:, 5, 5] = p + n1
    s2[:, 5, 6] = s2[:, 6, 5] = p + n1
    s2[:, 6, 6] = p + ntot
    return s2


def _psd_mask(mats: np.ndarray) -> np.ndarray:
    sym = 0.5 * (mats + mats.transpose(0, 2, 1))
    eigs = np.linalg.eigvalsh(sym)
    return eigs[:, 0] >= -1e-9


def _single_draw(batch_fn, labels, budget=_REJECTION_BUDGET):
    rejections = 0
    while True:
        mat = batch_fn(1)[0]
        if _psd_mask(mat[None])[0]:
            return CovMatrix(mat, labels)
        rejections += 1
        if rejections >= budget:
            raise SamplerStarvationError(
                f"rejected {rejections} consecutive draws; sampler starved"
            )


def sample_sigma1(src: SemanticSourceGaussian, rng, case: int = 2) -> CovMatrix:
    """One source-side covariance draw with the (S, U) block fixed exactly."""
    if case not in (1, 2):
        raise DomainError(f"case must be 1 or 2, got {case}")
    return _single_draw(lambda k: _sample_sigma1_batch(src, case, k, rng), SIGMA1_LABELS)


def sample_sigma2(ch: WiretapChannelGaussian, rng) -> CovMatrix:
    """One channel-side covariance draw with the (X, Y, Z) block fixed exactly."""
    return _single_draw(lambda k: _sample_sigma2_batch(ch, k, rng), SIGMA2_LABELS)


# ---------------------------------------------------------------------------
# inner bound: information terms and the piecewise-linear minimal r
# ---------------------------------------------------------------------------


def _logdet_batch(s: np.ndarray, idx: Sequence[int]) -> np.ndarray:
    sub = s[:, idx][:, :, idx]
    sign, val = np.linalg.slogdet(sub)
    return np.where(sign > 0, val / LN2, -np.inf)


def _mi_batch(s: np.ndarray, a: Sequence[int], b: Sequence[int], c: Sequence[int] = ()) -> np.ndarray:
    a, b, c = list(a), list(b), list(c)
    ld_c = _logdet_batch(s, c) if c else 0.0
    val = 0.5 * (
        _logdet_batch(s, a + c)
        + _logdet_batch(s, b + c)
        - ld_c
        - _logdet_batch(s, a + b + c)
    )
    return np.maximum(val, 0.0)


def _inner_terms(s1: np.ndarray, s2: np.ndarray, case: int) -> dict[str, np.ndarray]:
    """All information terms of the inner bound, batched.

    Source side (coordinates S=0, U=1, Sc=2, Sp=3, Uc=4, Up=5; the encoder
    input V is U in case 1 and (S, U) in case 2):

    * ``a1`` = I(Sc; V), ``a2`` = I(Sc, Sp; V), ``a3`` = I(Uc, Up; V | Sc);
    * ``d_s`` = Var(S | Sc, Sp), ``d_u`` = Var(U | Sc, Uc, Up) (minimum
      mean-square-error reconstruction distortions).

    Channel side (Wc=0, Wu=1, Qs=2, Qu=3, X=4, Y=5, Z=6):

    * ``b1`` = I(Wc; Y), ``b2`` = I(Wc, Qs; Y), ``b3`` = I(Wu, Qu; Y | Wc);
    * leakage gaps ``gqs_y`` = I(Qs; Y | Wc), ``gqs_z`` = I(Qs; Z | Wc),
      ``gqu_y`` = I(Qu; Y | Wc, Wu), ``gqu_z`` = I(Qu; Z | Wc, Wu),
      ``gj_z`` = I(Qs, Qu; Z | Wc, Wu).
    """
    v = [1] if case == 1 else [0, 1]
    with np.errstate(invalid="ignore"):
        terms = {
            "a1": _mi_batch(s1, [2], v),
            "a2": _mi_batch(s1, [2, 3], v),
            "a3": _mi_batch(s1, [4, 5], v, [2]),
            "d_s": np.exp2(_logdet_batch(s1, [0, 2, 3]) - _logdet_batch(s1, [2, 3])),
            "d_u": np.exp2(_logdet_batch(s1, [1, 2, 4, 5]) - _logdet_batch(s1, [2, 4, 5])),
            "b1": _mi_batch(s2, [0], [5]),
            "b2": _mi_batch(s2, [0, 2], [5]),
            "b3": _mi_batch(s2, [1, 3], [5], [0]),
            "gqs_y": _mi_batch(s2, [2], [5], [0]),
            "gqs_z": _mi_batch(s2, [2], [6], [0]),
            "gqu_y": _mi_batch(s2, [3], [5], [0, 1]),
            "gqu_z": _mi_batch(s2, [3], [6], [0, 1]),
            "gj_z": _mi_batch(s2, [2, 3], [6], [0, 1]),
        }
    return terms


def _mark(feas: np.ndarray, reason: np.ndarray, mask: np.ndarray, code: int) -> None:
    reason[mask & (reason == 0)] = code
    feas[mask] = False


def _inner_min_r_batch(
    t: dict[str, np.ndarray],
    targets: EquivocationTargets,
    entropies: tuple[float, float, float],
):
    """Minimal r per sample for the inner-bound inequality system.

    ``entropies`` is the (h(S), h(U), h(S,U)) triple of the source. Every
    constraint is piecewise linear in r (the positive-part brackets
    contribute at most one breakpoint), so the infimum feasible r is solved
    exactly. Disabled (-inf) targets are skipped. Returns (r, feasible,
    reason_code) arrays; strictness of the printed inequalities is absorbed
    into a 1e-9 slack.
    """
    n = len(t["a1"])
    feas = np.ones(n, dtype=bool)
    reason = np.zeros(n, dtype=np.int8)

    finite = np.ones(n, dtype=bool)
    for key, val in t.items():
        finite &= np.isfinite(val)
    _mark(feas, reason, ~finite, 10)

    a1, a2, a3 = t["a1"], t["a2"], t["a3"]
    b1, b2, b3 = t["b1"], t["b2"], t["b3"]
    with np.errstate(invalid="ignore"):
        # Public-layer constraint as printed: no r multiplier.
        _mark(feas, reason, finite & (a1 > b1 + _TOL), 1)
        r = np.maximum(
            np.where(a2 > _TOL, a2 / np.maximum(b2, _TINY), 0.0),
            np.where(a3 > _TOL, a3 / np.maximum(b3, _TINY), 0.0),
        )
        _mark(feas, reason, finite & (a2 > _TOL) & (b2 <= _TOL), 2)
        _mark(feas, reason, finite & (a3 > _TOL) & (b3 <= _TOL), 3)

        g_s = np.maximum(t["gqs_y"] - t["gqs_z"], 0.0)
        g_u = np.maximum(t["gqu_y"] - t["gqu_z"], 0.0)
        g_su = np.maximum(t["gqs_y"] + t["gqu_y"] - t["gj_z"], 0.0)
        gqu_y = t["gqu_y"]
        hs, hu, hsu = entropies

        if targets.delta_s != DISABLED:
            ds_t = targets.delta_s
            base = np.maximum(hs - a2, 0.0)
            r4 = np.where(gqu_y > _TINY, a3 / np.maximum(gqu_y, _TINY), np.inf)
            slope1 = g_s + gqu_y
            need = ds_t - (base - a3)
            c1 = need / np.maximum(slope1, _TINY)
            use1 = (need > 0.0) & (c1 <= r4) & (slope1 > 0.0)
            r_s = np.where(use1, c1, 0.0)
            m2 = (need > 0.0) & ~use1
            c2 = r4 + (ds_t - (base + r4 * g_s)) / np.maximum(g_s, _TINY)
            ok2 = m2 & (g_s > 0.0) & np.isfinite(r4)
            r_s = np.where(ok2, c2, r_s)
            _mark(feas, reason, finite & m2 & ~ok2, 4)
            r = np.maximum(r, r_s)
        if targets.delta_u != DISABLED:
            need_u = targets.delta_u - np.maximum(hu - a3, 0.0)
            r = np.maximum(
                r, np.where(need_u > 0.0, need_u / np.maximum(g_u, _TINY), 0.0)
            )
            _mark(feas, reason, finite & (need_u > 0.0) & (g_u <= 0.0), 5)
        if targets.delta_su != DISABLED:
            need_su = targets.delta_su - np.maximum(hsu - a2 - a3, 0.0)
            r = np.maximum(
                r, np.where(need_su > 0.0, need_su / np.maximum(g_su, _TINY), 0.0)
            )
            _mark(feas, reason, finite & (need_su > 0.0) & (g_su <= 0.0), 6)

    r = np.where(feas, np.maximum(r, 0.0), np.nan)
    return r, feas, reason


def _sound_regime_mask(
    t: dict[str, np.ndarray],
    targets: EquivocationTargets,
    src: SemanticSourceGaussian,
):
    """Scan-level acceptance filter for active equivocation targets.

    Keeps only draws whose source-coding rates stay within the entropy
    budget of every active secrecy constraint (and whose joint leakage gap
    is nonnegative for the joint constraint), the regime in which the
    equivocation bounds are fully backed by the coding argument. Returns
    (mask, reason_code) with codes 7-9 for the rejected draws.
    """
    n = len(t["a1"])
    mask = np.ones(n, dtype=bool)
    reason = np.zeros(n, dtype=np.int8)
    if targets.delta_s != DISABLED:
        bad = ~(t["a2"] <= src.h_s + _TOL)
        reason[bad & (reason == 0)] = 7
        mask &= ~bad
    if targets.delta_u != DISABLED:
        bad = ~((t["a1"] <= _TOL) & (t["a3"] <= src.h_u + _TOL))
        reason[bad & (reason == 0)] = 8
        mask &= ~bad
    if targets.delta_su != DISABLED:
        bad = ~(
            (t["a2"] + t["a3"] <= src.h_su + _TOL)
            & (t["gqs_y"] + t["gqu_y"] - t["gj_z"] >= -_TOL)
        )
        reason[bad & (reason == 0)] = 9
        mask &= ~bad
    return mask, reason


def inner_min_r(
    sample: InnerSample,
    targets: EquivocationTargets,
    case: int | None = None,
) -> MinRateResult:
    """Minimal channel-use ratio for one auxiliary-structure draw.

    The full inequality system is piecewise linear in r and solved exactly;
    structurally infeasible draws (for example the r-free public-layer
    constraint failing) come back infeasible with a reason code naming the
    violated constraint.
    """
    if case is None:
        case = sample.case
    elif case != sample.case:
        raise DomainError(f"case {case} disagrees with the sample's case {sample.case}")
    if targets.R_k != 0.0:
        raise DomainError("the inner bound is evaluated for zero key rate only")
    t = _inner_terms(sample.sigma1.entries[None], sample.sigma2.entries[None], case)
    src = _source_from_sigma1(sample.sigma1)
    r, feas, reason = _inner_min_r_batch(t, targets, (src.h_s, src.h_u, src.h_su))
    if feas[0]:
        return MinRateResult(float(r[0]), True)
    return MinRateResult(None, False, reason=REASON_NAMES[int(reason[0])])


def _source_from_sigma1(sigma1: CovMatrix) -> SemanticSourceGaussian:
    k = sigma1.entries[:2, :2]
    return SemanticSourceGaussian(float(k[0, 0]), float(k[1, 1]), float(k[0, 1]))


def draw_inner_samples(
    src: SemanticSourceGaussian,
    ch: WiretapChannelGaussian,
    targets: EquivocationTargets,
    case: int,
    n_samples: int,
    seed: int,
) -> dict[str, np.ndarray]:
    """Vectorized Monte-Carlo sweep of the inner bound.

    Returns per-sample arrays: achieved distortions ``d_s``/``d_u``, minimal
    ratios ``r`` (NaN where discarded), an ``accepted`` mask, and the
    ``reason`` codes (see :data:`REASON_NAMES`). Sampling is chunked with
    per-chunk substreams spawned from the master seed, so the first k
    samples are identical for every ``n_samples >= k`` (fixed-seed prefix
    stability).
    """
    if case not in (1, 2):
        raise DomainError(f"case must be 1 or 2, got {case}")
    if n_samples < 1:
        raise DomainError(f"need at least one sample, got {n_samples}")
    if targets.R_k != 0.0:
        raise DomainError("the inner bound is evaluated for zero key rate only")
    n_chunks = (n_samples + _CHUNK - 1) // _CHUNK
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    out = {key: [] for key in ("d_s", "d_u", "r", "accepted", "reason")}
    rejections = 0
    for ci in range(n_chunks):
        rng = np.random.default_rng(children[ci])
        s1 = _sample_sigma1_batch(src, case, _CHUNK, rng)
        s2 = _sample_sigma2_batch(ch, _CHUNK, rng)
        take = min(_CHUNK, n_samples - ci * _CHUNK)
        s1, s2 = s1[:take], s2[:take]
        psd = _psd_mask(s1) & _psd_mask(s2)
        rejections += int((~psd).sum())
        if rejections > _REJECTION_BUDGET:
            raise SamplerStarvationError(
                f"rejected {rejections} draws (budget {_REJECTION_BUDGET})"
            )
        t = _inner_terms(s1, s2, case)
        sound, sound_reason = _sound_regime_mask(t, targets, src)
        r, feas, reason = _inner_min_r_batch(
            t, targets, (src.h_s, src.h_u, src.h_su)
        )
        reason = reason.copy()
        unsound = sound_reason != 0
        reason[unsound & (reason == 0)] = sound_reason[unsound & (reason == 0)]
        reason[~psd] = 11
        accepted = psd & feas & sound
        r = np.where(accepted, r, np.nan)
        out["d_s"].append(t["d_s"])
        out["d_u"].append(t["d_u"])
        out["r"].append(r)
        out["accepted"].append(accepted)
        out["reason"].append(reason)
    return {key: np.concatenate(vals) for key, vals in out.items()}


def _resolve_grid(grid, src: SemanticSourceGaussian):
    if grid is None:
        grid = 40
    if isinstance(grid, int):
        if grid < 1:
            raise DomainError(f"grid must have at least one bucket, got {grid}")
        return (
            np.linspace(0.0, src.P_s, grid + 1),
            np.linspace(0.0, src.P_u, grid + 1),
        )
    edges_s, edges_u = grid
    edges_s = np.asarray(edges_s, dtype=float)
    edges_u = np.asarray(edges_u, dtype=float)
    for name, e in (("D_s", edges_s), ("D_u", edges_u)):
        if e.ndim != 1 or len(e) < 2 or np.any(np.diff(e) <= 0):
            raise DomainError(f"{name} bucket edges must be strictly increasing")
    return edges_s, edges_u


def inner_bound_scan(
    src: SemanticSourceGaussian,
    ch: WiretapChannelGaussian,
    targets: EquivocationTargets,
    case: int,
    n_samples: int,
    seed: int,
    grid=None,
    metadata: dict | None = None,
) -> RegionSurface:
    """Monte-Carlo inner-bound surface: per-bucket minimum feasible r.

    Draws ``n_samples`` auxiliary structures, evaluates the minimal ratio
    for each accepted draw, and keeps the minimum per (D_s, D_u) bucket.
    Buckets without accepted samples are reported as no-data (never
    interpolated). Deterministic for a fixed seed, with a stable prefix
    under sample-count growth.
    """
    edges_s, edges_u = _resolve_grid(grid, src)
    n_bs, n_bu = len(edges_s) - 1, len(edges_u) - 1
    samples = draw_inner_samples(src, ch, targets, case, n_samples, seed)
    acc = samples["accepted"]
    r_grid = np.full((n_bs, n_bu), np.inf)
    counts = np.zeros((n_bs, n_bu), dtype=int)
    if np.any(acc):
        bi = np.clip(np.digitize(samples["d_s"][acc], edges_s) - 1, 0, n_bs - 1)
        bj = np.clip(np.digitize(samples["d_u"][acc], edges_u) - 1, 0, n_bu - 1)
        np.minimum.at(r_grid, (bi, bj), samples["r"][acc])
        np.add.at(counts, (bi, bj), 1)
    reason_counts = {
        REASON_NAMES[int(code)]: int(cnt)
        for code, cnt in zip(*np.unique(samples["reason"], return_counts=True))
    }
    meta = {
        "kind": "inner",
        "case": case,
        "n_samples": n_samples,
        "seed": seed,
        "targets": {
            "delta_s": targets.delta_s,
            "delta_u": targets.delta_u,
            "delta_su": targets.delta_su,
            "R_k": targets.R_k,
        },
        "accepted": int(acc.sum()),
        "discard_reasons": reason_counts,
        "bucket_edges": {"D_s": edges_s.tolist(), "D_u": edges_u.tolist()},
    }
    if metadata:
        meta.update(metadata)
    has_data = counts > 0
    return RegionSurface(
        axes={
            "D_s": 0.5 * (edges_s[:-1] + edges_s[1:]),
            "D_u": 0.5 * (edges_u[:-1] + edges_u[1:]),
        },
        values=np.where(has_data, r_grid, np.nan),
        feasible=has_data,
        capped=np.zeros((n_bs, n_bu), dtype=bool),
        samples=counts,
        metadata=meta,
    )
