"""Error metrics: true error, windowed typical error, switching estimates.

The true error of a run is the norm of the final state's component outside
the target ground state.  Because it oscillates rapidly with the total time
t, scaling studies use the "typical error": an average of the true error
over the window [t - sqrt(t*tau0), t + sqrt(t*tau0)], sampled on a midpoint
grid.  Two reductions of the window samples are supported:

* ``mean`` -- the plain arithmetic window average;
* ``rms``  -- the quadratic window average sqrt(mean(eps^2)).

The rms reduction is the pipeline default: when several endpoint amplitudes
interfere, the rms average of the oscillating error converges exactly to the
quadrature-combined switching coefficient b_n, making eps_bar ~ b_n / t^n an
identity in the asymptotic regime, and it makes the peak-to-average bound
eps <= sqrt(2) * eps_bar sharp (both are the Cauchy-Schwarz relation between
the peak and the rms of a two-phasor superposition).  The plain mean of the
same signal sits ~10% lower (4/pi vs sqrt(2) for equal amplitudes) and is
kept for window-integral diagnostics.

``switching_estimate`` evaluates the asymptotic coefficient

    b_n = sqrt( sum_{j>0} |<j|d^nH/ds^n|g>|^2 / gap_j^(2n+2)  at s=0
              + the same at s=1 )

from endpoint eigensystems and endpoint derivatives, giving the estimator
curve b_n / t^n.  ``reference_scaling_estimate`` provides the commonly used
shortcut that treats an order-n endpoint ramp on scale k as a bare
(n!/k^n) rescaling of the first derivative; the exact transformed-path
coefficient differs from that shortcut by (n+1)/(1+k)^n, which the result
object records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .evolution import EvolutionConfig, evolve_many, ground_state
from .hamiltonians import HamiltonianPath
from .linalg import hermitian_eigensystem, overlap

REDUCTIONS = ("rms", "mean")

_GAP_FLOOR = 1e-10


class DegenerateGapError(ValueError):
    """An endpoint gap vanishes; the switching estimate is singular."""


def true_error(psi_final: np.ndarray, g_final: np.ndarray) -> float:
    """Norm of the component of psi_final orthogonal to g_final, in [0, 1].

    The overlap is divided by the actual state norms, so the residual norm
    drift of a propagated state (order 1e-10) cannot masquerade as error:
    an uncompensated drift d would otherwise put a floor of sqrt(2d), around
    1e-5, under every measurement.  Inputs still must be normalized to 1e-6.
    """
    norms = []
    for name, v in (("psi_final", psi_final), ("g_final", g_final)):
        n = float(np.linalg.norm(v))
        if abs(n - 1.0) > 1e-6:
            raise ValueError(f"{name} is not normalized")
        norms.append(n)
    ov = overlap(g_final, psi_final)
    projected = abs(ov) ** 2 / (norms[0] ** 2 * norms[1] ** 2)
    return math.sqrt(max(0.0, 1.0 - projected))


@dataclass(frozen=True)
class TypicalErrorConfig:
    """Window shape and sampling of the typical-error average."""

    tau0: float = 1.0
    samples: int = 64
    reduction: str = "rms"

    def __post_init__(self):
        if self.tau0 <= 0.0:
            raise ValueError(f"tau0 must be > 0, got {self.tau0}")
        if self.samples < 16:
            raise ValueError(f"need at least 16 window samples, got {self.samples}")
        if self.reduction not in REDUCTIONS:
            raise ValueError(f"reduction must be one of {REDUCTIONS}")


def window_samples(t: float, cfg: TypicalErrorConfig) -> np.ndarray:
    """Midpoint sample grid over [t - sqrt(t*tau0), t + sqrt(t*tau0)]."""
    half_width = math.sqrt(t * cfg.tau0)
    if t <= half_width:
        raise ValueError(f"window extends below zero: t={t}, tau0={cfg.tau0}")
    lo = t - half_width
    step = 2.0 * half_width / cfg.samples
    return lo + step * (np.arange(cfg.samples) + 0.5)


def reduce_window(errors: np.ndarray, reduction: str) -> float:
    errs = np.asarray(errors, dtype=float)
    if reduction == "mean":
        return float(np.mean(errs))
    if reduction == "rms":
        return float(np.sqrt(np.mean(errs**2)))
    raise ValueError(f"reduction must be one of {REDUCTIONS}")


def typical_error(eps_of_t: Callable[[float], float], t: float, cfg: TypicalErrorConfig) -> float:
    """Windowed average of eps_of_t around t; one evaluation per sample."""
    errs = np.array([eps_of_t(ti) for ti in window_samples(t, cfg)])
    return reduce_window(errs, cfg.reduction)


@dataclass(frozen=True)
class MeasuredError:
    """Single-shot and window-averaged true error of one path at one t."""

    t: float
    error: float
    typical: float
    window_errors: tuple[float, ...]
    norm_drift_max: float
    steps_taken: int


def measure_errors(
    path: HamiltonianPath,
    t: float,
    te_cfg: TypicalErrorConfig,
    ev_cfg: EvolutionConfig,
) -> MeasuredError:
    """Evolve t plus its whole sample window in one batch and score it."""
    psi0 = ground_state(path, ev_cfg.s_start)
    g_end = ground_state(path, ev_cfg.s_end)
    ts = np.concatenate(([t], window_samples(t, te_cfg)))
    batch = evolve_many(path, ev_cfg, ts, psi0)
    errs = np.array([true_error(batch.final_states[i], g_end) for i in range(ts.shape[0])])
    return MeasuredError(
        t=t,
        error=float(errs[0]),
        typical=reduce_window(errs[1:], te_cfg.reduction),
        window_errors=tuple(float(e) for e in errs[1:]),
        norm_drift_max=float(np.max(batch.norm_drifts)),
        steps_taken=batch.steps_taken,
    )


@dataclass(frozen=True)
class LevelTerm:
    """One excited level's contribution to an endpoint coefficient."""

    endpoint: int
    level: int
    gap: float
    element: complex
    term: complex  # element / gap**(order + 1)


@dataclass(frozen=True)
class SwitchingEstimate:
    """Asymptotic error coefficient of order n and its endpoint split."""

    order: int
    start_coefficient: float
    end_coefficient: float
    coefficient: float
    level_terms: tuple[LevelTerm, ...] = field(repr=False)

    def curve(self, t: float | np.ndarray):
        """The estimator coefficient / t**order."""
        return self.coefficient / np.asarray(t, dtype=float) ** self.order


def switching_estimate(path: HamiltonianPath, order: int) -> SwitchingEstimate:
    """Evaluate the order-n asymptotic coefficient from endpoint data.

    Requires a non-degenerate ground level at both endpoints; a vanishing
    gap makes the estimate singular and raises DegenerateGapError.
    """
    if order < 1:
        raise ValueError(f"estimate order must be >= 1, got {order}")
    per_endpoint = []
    terms: list[LevelTerm] = []
    for endpoint in (0, 1):
        eig = hermitian_eigensystem(path.evaluate(float(endpoint)))
        scale = max(1.0, float(np.max(np.abs(eig.eigenvalues))))
        gaps = eig.gaps()
        if np.any(gaps < _GAP_FLOOR * scale):
            raise DegenerateGapError(
                f"vanishing gap at endpoint {endpoint}: gaps {gaps.tolist()}"
            )
        h_n = path.endpoint_deriv(endpoint, order)
        g = eig.ground
        total = 0.0
        for j in range(1, path.dim):
            element = complex(np.vdot(eig.vector(j), h_n @ g))
            term = element / gaps[j - 1] ** (order + 1)
            terms.append(LevelTerm(endpoint, j, float(gaps[j - 1]), element, term))
            total += abs(term) ** 2
        per_endpoint.append(math.sqrt(total))
    b0, b1 = per_endpoint
    return SwitchingEstimate(order, b0, b1, math.hypot(b0, b1), tuple(terms))


@dataclass(frozen=True)
class ReferenceScalingEstimate:
    """Shortcut coefficient for an order-n endpoint ramp on scale k.

    ``bracket`` is the base path's first-derivative bracket evaluated with
    the gap powers of the order-(n+1) estimate.  The shortcut treats the
    ramp as a bare n!/k^n rescaling of the first derivative, so the exact
    transformed-path coefficient equals ``substituted_coefficient`` times
    (n+1)/(1+k)^n; ``sqrt_prefactor_coefficient`` is the sqrt(n!/k^n)-scaled
    variant often quoted for onset-timescale arguments.  Both are labeled
    approximate wherever they are emitted.
    """

    ramp_order: int
    error_order: int
    k: float
    bracket: float
    sqrt_prefactor_coefficient: float
    substituted_coefficient: float

    def curve(self, t: float | np.ndarray):
        return self.sqrt_prefactor_coefficient / np.asarray(t, dtype=float) ** self.error_order

    def exact_to_substituted_ratio(self) -> float:
        """Exact coefficient over the shortcut for a bare ramp^n transform.

        (n+1)/(1+k)^n, from the series of ramp(s)^n * base * ramp(1-s)^n at
        the endpoint.  Pulses carrying a midpoint normalization gain an extra
        (1+2k)^(2n) on top of this.
        """
        return (self.ramp_order + 1) / (1.0 + self.k) ** self.ramp_order


def reference_scaling_estimate(
    path_base: HamiltonianPath, k: float, n: int
) -> ReferenceScalingEstimate:
    """Approximate order-(n+1) coefficient for ramp-smoothed versions of a path.

    ``path_base`` is the unsmoothed path (nonzero first endpoint derivative);
    n = 0 means no smoothing and reduces to the exact first-order estimate.
    """
    if n < 0:
        raise ValueError(f"ramp order must be >= 0, got {n}")
    if n > 0 and k <= 0.0:
        raise ValueError("a positive k is required for ramp order n >= 1")
    error_order = n + 1
    total = 0.0
    for endpoint in (0, 1):
        eig = hermitian_eigensystem(path_base.evaluate(float(endpoint)))
        gaps = eig.gaps()
        scale = max(1.0, float(np.max(np.abs(eig.eigenvalues))))
        if np.any(gaps < _GAP_FLOOR * scale):
            raise DegenerateGapError(f"vanishing gap at endpoint {endpoint}")
        h1 = path_base.endpoint_deriv(endpoint, 1)
        g = eig.ground
        for j in range(1, path_base.dim):
            element = complex(np.vdot(eig.vector(j), h1 @ g))
            total += abs(element / gaps[j - 1] ** (error_order + 1)) ** 2
    bracket = math.sqrt(total)
    boost = math.factorial(n) / k**n if n > 0 else 1.0
    return ReferenceScalingEstimate(
        ramp_order=n,
        error_order=error_order,
        k=k,
        bracket=bracket,
        sqrt_prefactor_coefficient=math.sqrt(boost) * bracket,
        substituted_coefficient=boost * bracket,
    )


def loglog_slope(ts: np.ndarray, values: np.ndarray) -> float:
    """Least-squares slope of log(values) against log(ts)."""
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if ts.shape[0] < 2:
        raise ValueError("need at least two points for a slope")
    if np.any(values <= 0.0) or np.any(ts <= 0.0):
        raise ValueError("log-log slope needs positive data")
    return float(np.polyfit(np.log(ts), np.log(values), 1)[0])


def local_scaling_exponent(ts: np.ndarray, values: np.ndarray, t: float) -> float:
    """Slope of log(values) vs log(ts) over the 5 points centered nearest t."""
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if ts.shape[0] < 5:
        raise ValueError("need at least 5 points bracketing t")
    center = int(np.argmin(np.abs(np.log(ts) - math.log(t))))
    if center < 2 or center > ts.shape[0] - 3:
        raise ValueError(f"t={t} is too close to the grid edge for a centered window")
    window = slice(center - 2, center + 3)
    return loglog_slope(ts[window], values[window])


def decade_slope(ts: np.ndarray, values: np.ndarray, t_lo: float, t_hi: float) -> float:
    """Least-squares log-log slope over grid points with t_lo <= t <= t_hi."""
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (ts >= t_lo * (1.0 - 1e-9)) & (ts <= t_hi * (1.0 + 1e-9))
    if int(np.sum(mask)) < 3:
        raise ValueError(f"fewer than 3 grid points in [{t_lo}, {t_hi}]")
    return loglog_slope(ts[mask], values[mask])


SQRT2_BOUND_SLACK = 0.02


def sqrt2_bound_check(eps: float, eps_bar: float, slack: float = SQRT2_BOUND_SLACK) -> bool:
    """True iff eps <= sqrt(2) * eps_bar * (1 + slack)."""
    return eps <= math.sqrt(2.0) * eps_bar * (1.0 + slack)


def crossover_time(
    ts: np.ndarray, ratios: np.ndarray, band: tuple[float, float] = (0.8, 1.25)
) -> float | None:
    """First t from which the ratio enters [band] and stays inside.

    Returns None when the tail never settles into the band.
    """
    ts = np.asarray(ts, dtype=float)
    ratios = np.asarray(ratios, dtype=float)
    lo, hi = band
    inside = (ratios >= lo) & (ratios <= hi)
    for i in range(ts.shape[0]):
        if np.all(inside[i:]):
            return float(ts[i])
    return None
