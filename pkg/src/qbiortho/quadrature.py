"""Deterministic quadrature: trapezoid rule on the p-torus and truncated real-line integration."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import BudgetExceeded, InvalidParameters, TolNotReached

DEFAULT_BUDGET = 2 ** 24
# lattice points per reduction leaf; fixed so results never depend on worker count
CHUNK = 2 ** 14


def pairwise_sum(values: Sequence) -> complex:
    """Sum by a balanced binary tree in index order."""
    values = list(values)
    if not values:
        return 0.0
    while len(values) > 1:
        paired = [values[i] + values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            paired.append(values[-1])
        values = paired
    return values[0]


@dataclass(frozen=True)
class TorusGridSpec:
    """Uniform lattice on [-pi, pi)^p.

    ``integrand`` receives an array of angles with shape (p, k) and returns k
    values. ``jobs`` only changes scheduling, never the result.
    """

    p: int
    points_per_dim: int
    integrand: Callable[[np.ndarray], np.ndarray]
    budget: int = DEFAULT_BUDGET
    jobs: int = 1

    def __post_init__(self) -> None:
        M = self.points_per_dim
        if self.p < 1:
            raise InvalidParameters("torus dimension must be positive")
        if M < 16 or M & (M - 1):
            raise InvalidParameters(f"points_per_dim must be a power of two >= 16, got {M}")
        if M ** self.p > self.budget:
            raise BudgetExceeded(f"{M}^{self.p} lattice points exceed the budget of {self.budget}")


def _chunk_sums(spec: TorusGridSpec, start: int, stop: int) -> tuple[complex, complex]:
    M, p = spec.points_per_dim, spec.p
    flat = np.arange(start, stop)
    idx = np.unravel_index(flat, (M,) * p)
    theta = np.stack([-math.pi + (2 * math.pi / M) * i for i in idx])
    values = np.asarray(spec.integrand(theta), dtype=complex).reshape(-1)
    if values.shape[0] != flat.shape[0]:
        raise ValueError("integrand must return one value per lattice point")
    even = np.ones(flat.shape[0], dtype=bool)
    for i in idx:
        even &= (i % 2) == 0
    return complex(np.sum(values)), complex(np.sum(values[even]))


def torus_integrate(spec: TorusGridSpec) -> tuple[complex, float]:
    """Trapezoid rule on the torus.

    Returns the integral and |I(M) - I(M/2)|, where the coarse value reuses the
    even-index subset of the same lattice.
    """
    M, p = spec.points_per_dim, spec.p
    total = M ** p
    bounds = [(s, min(s + CHUNK, total)) for s in range(0, total, CHUNK)]
    if spec.jobs > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=spec.jobs) as pool:
            sums = list(pool.map(lambda b: _chunk_sums(spec, *b), bounds))
    else:
        sums = [_chunk_sums(spec, *b) for b in bounds]
    fine = pairwise_sum([s[0] for s in sums]) * (2 * math.pi / M) ** p
    coarse = pairwise_sum([s[1] for s in sums]) * (4 * math.pi / M) ** p
    return fine, abs(fine - coarse)


@dataclass(frozen=True)
class LineQuadSpec:
    integrand: Callable[[float], float]
    truncation: float
    rel_tol: float = 1e-10
    even: bool = False  # integrate over [0, T] and double

    def __post_init__(self) -> None:
        if self.truncation <= 0 or self.rel_tol <= 0:
            raise InvalidParameters("truncation and rel_tol must be positive")


def choose_truncation(f: Callable[[float], float], ratio: float = 1e-30, step: float = 1.0,
                      limit: float = 1e4) -> float:
    """Smallest multiple of ``step`` beyond the peak of |f| on x >= 0 where |f| < ratio * max|f|."""
    peak = 0.0
    x = 0.0
    while x < limit:
        v = abs(f(x))
        peak = max(peak, v)
        if peak > 0 and v < ratio * peak and x > 0:
            return x
        x += step
    raise TolNotReached(f"integrand does not decay below {ratio} of its peak before x = {limit}")


def _tail_bound(f: Callable[[float], float], T: float) -> float:
    a, b = abs(f(T)), abs(f(T + 1.0))
    if a == 0:
        return 0.0
    if b >= a:
        return math.inf
    return a / math.log(a / b) if b > 0 else a


def line_integrate(spec: LineQuadSpec) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod on [-T, T]; the estimate adds a tail bound beyond +-T."""
    f, T = spec.integrand, spec.truncation
    lo = 0.0 if spec.even else -T
    # split at integers so narrow features are not skipped by the first panel
    edges = np.linspace(lo, T, int(math.ceil(T - lo)) + 1)
    value, err, magnitude = 0.0, 0.0, 0.0
    # quadpack refuses epsrel below 50 machine epsilons
    epsrel = max(spec.rel_tol * 1e-2, 50 * np.finfo(float).eps)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            v, e = integrate.quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=200)
            value += v
            err += e
            magnitude += abs(v)
    tail = _tail_bound(f, T)
    if not spec.even:
        tail += _tail_bound(lambda x: f(-x), T)
    if spec.even:
        value, err, tail, magnitude = 2 * value, 2 * err, 2 * tail, 2 * magnitude
    # panel magnitudes keep the scale meaningful when the integral cancels to zero
    scale = max(abs(value), magnitude, 1e-300)
    if err > spec.rel_tol * scale and err > 1e-300:
        raise TolNotReached(f"quadrature error {err:.3e} exceeds rel_tol {spec.rel_tol:.1e} of {value:.6e}")
    return value, err + tail
