"""Brownian bridge sampling on the torus, tube-conditioned bridges, and the
height decomposition used to start the coupled dynamics.

A Brownian bridge pinned to b(0) = 0 is sampled in Fourier space: the k-th
coefficient is n_k / (2 pi |k|) with i.i.d. standard complex Gaussians n_k
(real and imaginary parts of variance 1/2 each, Hermitian mirror), plus the
zero-mode shift enforcing b(0) = 0.  With this scale the pointwise variance
is x(1-x) and the gradient of the bridge is spatial white noise with unit
per-mode variance, i.e. exactly the invariant law of the truncated Burgers
dynamics.  Conditioning on a uniform tube around a target profile is done by
exact rejection on the truncated bridge; the acceptance rate doubles as an
estimate of the tube probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.fft import next_fast_len

from .spectral import GridField, SpectralField, project_uv, synthesize, to_grid


@dataclass(frozen=True)
class TargetProfile:
    """Continuous height profile on the torus, pinned so h0(0) = 0."""

    name: str
    raw: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.raw(x) - self.raw(np.zeros(1))[0]

    def spectral(self, cutoff: int, grid: int = 4096) -> SpectralField:
        """Fourier truncation of the profile, via a dense sampling grid."""
        if grid < 8 * max(cutoff, 1):
            grid = 8 * max(cutoff, 1)
        grid = next_fast_len(grid, real=True)
        x = np.arange(grid) / grid
        vals = self(x)
        from .spectral import analyze

        return SpectralField.from_half(analyze(vals, cutoff))

    def sup_truncation_error(self, cutoff: int, grid: int = 4096) -> float:
        """Uniform distance between the profile and its Fourier truncation."""
        grid = next_fast_len(max(grid, 8 * max(cutoff, 1)), real=True)
        x = np.arange(grid) / grid
        approx = to_grid(self.spectral(cutoff, grid), grid).values
        return float(np.max(np.abs(approx - self(x))))


def _triangle(amplitude: float):
    def raw(x):
        x = np.mod(np.asarray(x, dtype=float), 1.0)
        up = 4.0 * x
        down = 2.0 - 4.0 * x
        tail = 4.0 * x - 4.0
        return amplitude * np.where(x < 0.25, up, np.where(x < 0.75, down, tail))

    return raw


def _weierstrass(scale: float, a: float = 0.55, b: int = 3, terms: int = 7):
    js = np.arange(terms)

    def raw(x):
        x = np.asarray(x, dtype=float)
        phases = 2.0 * np.pi * np.outer(x, b ** js)
        return scale * (np.cos(phases) @ (a ** js))

    return raw


TARGETS: dict[str, TargetProfile] = {
    "zero": TargetProfile("zero", lambda x: np.zeros_like(np.asarray(x, dtype=float))),
    "sine": TargetProfile("sine", lambda x: 0.3 * np.sin(2.0 * np.pi * np.asarray(x, dtype=float))),
    "triangle": TargetProfile("triangle", _triangle(0.25)),
    "weierstrass": TargetProfile("weierstrass", _weierstrass(0.1)),
}


def get_target(name: str) -> TargetProfile:
    try:
        return TARGETS[name]
    except KeyError:
        raise KeyError(f"unknown target {name!r}; available: {sorted(TARGETS)}") from None


# --- bridge sampling ---------------------------------------------------------


def bridge_mode_scales(cutoff: int) -> np.ndarray:
    """Standard deviations of the bridge coefficients at k = 1..cutoff."""
    return 1.0 / (2.0 * np.pi * np.arange(1, cutoff + 1))


def _draw_bridge_coeffs(cutoff: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, cutoff) coefficients for modes k = 1..cutoff."""
    n = (rng.standard_normal((count, cutoff)) + 1j * rng.standard_normal((count, cutoff)))
    return n * np.sqrt(0.5) * bridge_mode_scales(cutoff)


def _bridge_field(pos_coeffs: np.ndarray) -> SpectralField:
    """Assemble a pinned bridge from its positive-mode coefficients."""
    cutoff = pos_coeffs.size
    half = np.zeros(cutoff + 1, dtype=complex)
    half[1:] = pos_coeffs
    # zero mode shifts the path so that b(0) = sum_k c_k = 0
    half[0] = -2.0 * np.sum(pos_coeffs.real)
    return SpectralField.from_half(half)


def sample_bridge(cutoff: int, rng: np.random.Generator) -> SpectralField:
    """One Brownian bridge truncated at ``cutoff`` modes, pinned to b(0) = 0."""
    if cutoff < 1:
        raise ValueError("bridge cutoff must be >= 1")
    return _bridge_field(_draw_bridge_coeffs(cutoff, 1, rng)[0])


def sample_invariant_modes(cutoff: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draws from the white-noise law the gradient dynamics preserves:
    independent standard complex Gaussians per mode k = 1..cutoff (this is
    exactly the law of the bridge gradient).  Returns half spectra
    (count, cutoff+1) with the zero mode pinned."""
    z = (rng.standard_normal((count, cutoff + 1)) + 1j * rng.standard_normal((count, cutoff + 1)))
    z *= np.sqrt(0.5)
    z[:, 0] = 0.0
    return z


@dataclass(frozen=True)
class ConditionedBridgeConfig:
    eps: float
    target: TargetProfile
    bridge_cutoff: int
    max_attempts: int = 2_000_000
    check_grid_factor: int = 8

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("tube half-width eps must be positive")
        if self.bridge_cutoff < 1:
            raise ValueError("bridge cutoff must be >= 1")
        if self.check_grid_factor < 8:
            raise ValueError("tube membership requires a grid of >= 8*cutoff points")

    @property
    def check_grid(self) -> int:
        return next_fast_len(self.check_grid_factor * self.bridge_cutoff, real=True)


@dataclass(frozen=True)
class ConditionedBridgeSample:
    field: SpectralField
    attempts: int
    acceptance_estimate: float


class TubeTooUnlikelyError(RuntimeError):
    """Rejection sampling exhausted its attempt budget.

    Carries the empirical acceptance estimate, which doubles as an estimate
    of the tube probability at this truncation."""

    def __init__(self, attempts: int, accepted: int):
        self.attempts = attempts
        self.accepted = accepted
        self.acceptance_estimate = accepted / max(attempts, 1)
        super().__init__(
            f"no accepted bridge in {attempts} attempts "
            f"(acceptance estimate {self.acceptance_estimate:.2e}); "
            "the tube is too unlikely for this target at this cutoff"
        )


def _conditioned_batch(
    cfg: ConditionedBridgeConfig,
    count: int,
    rng: np.random.Generator,
    batch: int = 8192,
) -> tuple[np.ndarray, int]:
    """Accept ``count`` bridges; returns (coeff rows k=1..K, total attempts)."""
    k = cfg.bridge_cutoff
    m = cfg.check_grid
    x = np.arange(m) / m
    target_vals = cfg.target(x)
    accepted = np.empty((count, k), dtype=complex)
    got = 0
    attempts = 0
    while got < count:
        if attempts >= cfg.max_attempts:
            raise TubeTooUnlikelyError(attempts, got)
        n_draw = min(batch, cfg.max_attempts - attempts)
        coeffs = _draw_bridge_coeffs(k, n_draw, rng)
        half = np.zeros((n_draw, k + 1), dtype=complex)
        half[:, 1:] = coeffs
        vals = synthesize(half, m)
        vals -= vals[:, :1]  # pin b(0) = 0
        ok = np.max(np.abs(vals - target_vals), axis=1) <= cfg.eps
        idx = np.nonzero(ok)[0][: count - got]
        accepted[got: got + idx.size] = coeffs[idx]
        got += idx.size
        # draws past the last acceptance we consume are not attempts
        attempts += n_draw if got < count else int(idx[-1]) + 1
    return accepted, attempts


def sample_conditioned_bridge(
    cfg: ConditionedBridgeConfig, rng: np.random.Generator
) -> ConditionedBridgeSample:
    """First bridge whose path stays uniformly within eps of the target.

    Tube membership is checked on ``cfg.check_grid`` equispaced points (at
    least 8 per bridge mode), a finite surrogate for the uniform norm."""
    coeffs, attempts = _conditioned_batch(cfg, 1, rng)
    return ConditionedBridgeSample(
        field=_bridge_field(coeffs[0]),
        attempts=attempts,
        acceptance_estimate=1.0 / attempts,
    )


def sample_conditioned_bridges(
    cfg: ConditionedBridgeConfig, count: int, rng: np.random.Generator
) -> tuple[list[SpectralField], float]:
    """Batch variant for ensembles; returns fields and the acceptance rate."""
    coeffs, attempts = _conditioned_batch(cfg, count, rng)
    return [_bridge_field(c) for c in coeffs], count / attempts


# --- decomposition -----------------------------------------------------------


@dataclass(frozen=True)
class DecompositionPair:
    """Initial heights: a conditioned-bridge part and the residual part.

    The sum h1_init + h2_init reproduces the truncated target exactly."""

    h1_init: SpectralField
    h2_init: SpectralField

    def __post_init__(self):
        if self.h1_init.cutoff != self.h2_init.cutoff:
            raise ValueError("decomposition parts must share a cutoff")


def decompose_initial(
    target: TargetProfile, bridge: SpectralField, cutoff: int
) -> DecompositionPair:
    """h1 = truncated bridge, h2 = truncated target minus h1 (exact sum)."""
    h1 = project_uv(bridge, cutoff)
    if h1.cutoff < cutoff:
        pad = np.zeros(2 * cutoff + 1, dtype=complex)
        pad[cutoff - h1.cutoff: cutoff + h1.cutoff + 1] = h1.coeffs
        h1 = SpectralField(cutoff, pad, h1.zero_mean)
    target_n = target.spectral(cutoff)
    h2 = SpectralField(cutoff, target_n.coeffs - h1.coeffs)
    return DecompositionPair(h1_init=h1, h2_init=h2)


def uniform_distance(f: GridField, g: GridField) -> float:
    """max_j |f_j - g_j| on a shared grid."""
    if f.size != g.size:
        raise ValueError(f"grid sizes differ: {f.size} vs {g.size}")
    return float(np.max(np.abs(f.values - g.values)))
