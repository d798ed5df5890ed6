"""Interferometric overlap estimation: exact probabilities and shot sampling.

The ancilla of the overlap-test circuit reads |0> with probability
(1 + tr{rho sigma})/2, so the outcome distribution is fully determined and is
sampled directly rather than simulated gate by gate.  Verdicts use Hoeffding
bounds, which are valid at every shot count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import DensityMatrix, real_trace_product
from .witness import ApproxWitness


@dataclass(frozen=True)
class ShotResult:
    shots: int
    zeros: int
    estimate: float  # estimate of tr{rho sigma} = 2 zeros/shots - 1
    std_error: float
    confidence_interval: tuple[float, float]
    level: float


@dataclass(frozen=True)
class EstimatorVerdict:
    verdict: str  # detected | not-detected | inconclusive
    threshold: float
    lower_bound: float
    upper_bound: float
    shot_result: ShotResult


def swap_test_probability(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """p(|0>) = (1 + tr{rho sigma}) / 2, computed exactly."""
    if rho.dim != sigma.dim:
        raise DomainError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    return (1.0 + real_trace_product(rho, sigma)) / 2.0


def hoeffding_epsilon(shots: int, level: float) -> float:
    """One-sided Hoeffding deviation for the overlap estimate at the given level."""
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level}")
    if shots < 1:
        raise DomainError(f"shot count must be >= 1, got {shots}")
    return 2.0 * np.sqrt(np.log(1.0 / (1.0 - level)) / (2.0 * shots))


def sample_overlap(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    shots: int,
    seed: int,
    level: float = 0.95,
) -> ShotResult:
    """Simulate the ancilla statistics for `shots` repetitions, seeded."""
    if shots < 1:
        raise DomainError(f"shot count must be >= 1, got {shots}")
    p0 = swap_test_probability(rho, sigma)
    p0 = min(1.0, max(0.0, p0))
    rng = np.random.default_rng(seed)
    zeros = int(rng.binomial(shots, p0))
    p_hat = zeros / shots
    estimate = 2.0 * p_hat - 1.0
    std_error = 2.0 * np.sqrt(p_hat * (1.0 - p_hat) / shots)
    eps = hoeffding_epsilon(shots, level)
    return ShotResult(
        shots=shots,
        zeros=zeros,
        estimate=estimate,
        std_error=float(std_error),
        confidence_interval=(estimate - eps, estimate + eps),
        level=level,
    )


def detect_with_confidence(
    rho: DensityMatrix,
    a: ApproxWitness,
    shots: int,
    seed: int,
    level: float = 0.99,
) -> EstimatorVerdict:
    """Shot-based detection verdict with distribution-free confidence bounds.

    `detected` when the upper bound on tr{rho rho_W} falls below the
    threshold, `not-detected` when the lower bound clears it, `inconclusive`
    when the interval straddles the threshold.
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level}")
    sr = sample_overlap(rho, a.state, shots, seed, level=level)
    lo, hi = sr.confidence_interval
    if hi < a.threshold:
        verdict = "detected"
    elif lo > a.threshold:
        verdict = "not-detected"
    else:
        verdict = "inconclusive"
    return EstimatorVerdict(
        verdict=verdict,
        threshold=a.threshold,
        lower_bound=lo,
        upper_bound=hi,
        shot_result=sr,
    )


def estimator_to_dict(v: EstimatorVerdict) -> dict:
    sr = v.shot_result
    return {
        "verdict": v.verdict,
        "threshold": v.threshold,
        "lower_bound": v.lower_bound,
        "upper_bound": v.upper_bound,
        "shots": sr.shots,
        "zeros": sr.zeros,
        "estimate": sr.estimate,
        "std_error": sr.std_error,
        "level": sr.level,
    }
