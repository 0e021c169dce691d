"""Multiplicative-noise stochastic heat equation and the log-transform
reference solution.

One Ito step is a Lie splitting: the heat semigroup acts in spectrum, then
the field is multiplied pointwise by (1 + beta dW(x)) with dW the grid
realization of the mode-truncated noise increment (E dW(x)^2 = 2 dt (2N+1)).
The heat multiplier is the DFT of the periodic heat kernel *sampled on the
grid* (an aliased sum over wrapped Gaussians): it differs from the raw decay
e^{-(2 pi k)^2 dt} only by the alias tail e^{-4 pi^2 (M-|k|)^2 dt} at the
highest modes, and it makes the propagator an entrywise-positive circulant.
Positivity of the propagator is what turns the comparison principle into a
structural property of the scheme: two solutions driven by the same noise
keep their pointwise order to roundoff, not merely to discretization error.

Heights follow by h = log(z)/beta; the slope field d/dx h is the reference
against which the truncated gradient dynamics is compared in law.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft

from .dynamics import NoisePath
from .spectral import GridField, synthesize


class PositivityError(RuntimeError):
    """The multiplicative update produced a nonpositive value."""


def she_grid_size(cutoff: int, dt: float, oversample: int = 2) -> int:
    """Grid fine enough for the noise truncation *and* the heat kernel.

    The sampled heat kernel needs grid spacing below the kernel width
    sqrt(2 dt), or its aliased multiplier inflates the slow modes (the k = 0
    alias term is exp(-4 pi^2 m^2 dt)); the bound here keeps that below 1e-7.
    """
    by_modes = oversample * (2 * cutoff + 1)
    by_kernel = int(np.ceil(0.66 / np.sqrt(dt)))
    return next_fast_len(max(by_modes, by_kernel), real=True)


@dataclass(frozen=True)
class SheState:
    """Strictly positive grid field z at time t, with the growth coefficient
    beta of the height transform h = log(z)/beta."""

    grid: GridField
    beta: float
    t: float = 0.0

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if np.any(self.grid.values <= 0):
            raise ValueError("state values must be strictly positive")


def heat_multiplier(m: int, dt: float, wraps: int = 4) -> np.ndarray:
    """Positive-circulant heat-step multiplier on the rfft bins of an m-grid.

    mu_k = sum_r exp(-4 pi^2 (k + r m)^2 dt): the DFT of the wrapped heat
    kernel sampled at the grid points.  All kernel samples are positive, so
    the induced circulant map preserves pointwise order exactly."""
    k = np.arange(m // 2 + 1, dtype=float)
    mu = np.zeros_like(k)
    for r in range(-wraps, wraps + 1):
        mu += np.exp(-4.0 * np.pi ** 2 * (k + r * m) ** 2 * dt)
    return mu


def noise_grid_increment(dw_half: np.ndarray, m: int) -> np.ndarray:
    """Grid realization of the truncated noise increment (batched)."""
    return synthesize(dw_half, m)


def _she_step_values(
    z: np.ndarray, beta: float, mu: np.ndarray, dw_grid: np.ndarray
) -> np.ndarray:
    m = z.shape[-1]
    heated = irfft(rfft(z, axis=-1) * mu, n=m, axis=-1)
    return heated * (1.0 + beta * dw_grid)


def step_she(z: SheState, dt: float, dw) -> SheState:
    """One Ito step; ``dw`` is an increment row (modes 0..N) or a NoisePath
    to draw it from.  The noise truncation is the same object that drives
    the gradient dynamics, so pathwise coupling across solvers is exact."""
    if isinstance(dw, NoisePath):
        if abs(dw.dt - dt) > 1e-15:
            raise ValueError("noise path dt disagrees with the step dt")
        dw = dw.increments(1)[0]
    dw = np.asarray(dw)
    m = z.grid.size
    mu = heat_multiplier(m, dt)
    out = _she_step_values(z.grid.values[None, :], z.beta, mu, noise_grid_increment(dw[None, :], m))[0]
    if np.any(out <= 0) or not np.all(np.isfinite(out)):
        raise PositivityError("positivity loss - reduce dt or N")
    return SheState(grid=GridField(out), beta=z.beta, t=z.t + dt)


def cole_hopf_height(z: SheState) -> GridField:
    """Pointwise height h = log(z)/beta."""
    vals = z.grid.values
    if np.any(vals <= 0):
        raise PositivityError("positivity loss - reduce dt or N")
    return GridField(np.log(vals) / z.beta)


def coupled_tube_bound(heights_a, heights_b) -> float:
    """Max over recorded times of sup_x |h_a(t, x) - h_b(t, x)|.

    Both arguments are height trajectories from a coupled pair (same noise
    path): sequences of GridField or an array of shape (n_times, m)."""
    va = _height_array(heights_a)
    vb = _height_array(heights_b)
    if va.shape != vb.shape:
        raise ValueError(f"trajectories differ in shape: {va.shape} vs {vb.shape}")
    return float(np.max(np.abs(va - vb)))


def _height_array(heights) -> np.ndarray:
    if isinstance(heights, np.ndarray):
        return np.atleast_2d(heights)
    return np.stack([h.values if isinstance(h, GridField) else np.asarray(h) for h in heights])


@dataclass
class SheEnsembleResult:
    times: np.ndarray
    heights: Optional[np.ndarray]  # (n_traj, n_times, m) when recorded
    slope_probe_values: Optional[np.ndarray]  # (n_traj, n_times, n_probes)
    mean_series: np.ndarray  # (n_times,) ensemble x space mean of z
    failed: np.ndarray
    final: np.ndarray


def run_she_ensemble(
    init_values: np.ndarray,
    beta: float,
    dt: float,
    n_steps: int,
    n_noise_modes: int,
    record_steps: np.ndarray,
    noise: NoisePath,
    probes=None,
    keep_heights: bool = False,
) -> SheEnsembleResult:
    """Advance a batch of positive fields; optionally record slope probes.

    Rows that lose positivity are tagged failed and carry NaN onward."""
    z = np.atleast_2d(np.asarray(init_values, dtype=float)).copy()
    ensemble, m = z.shape
    if np.any(z <= 0):
        raise ValueError("initial values must be strictly positive")
    mu = heat_multiplier(m, dt)
    record_steps = np.asarray(record_steps, dtype=int)
    times = record_steps * dt
    failed = np.zeros(ensemble, dtype=bool)
    heights = np.full((ensemble, record_steps.size, m), np.nan) if keep_heights else None
    n_probes = len(probes.probes) if probes is not None else 0
    probe_vals = (
        np.full((ensemble, record_steps.size, n_probes), np.nan) if probes is not None else None
    )
    mean_series = np.full(record_steps.size, np.nan)
    deriv = None
    rec_idx = 0

    def record():
        nonlocal rec_idx, deriv
        ok = ~failed
        mean_series[rec_idx] = float(np.mean(z[ok])) if np.any(ok) else np.nan
        if keep_heights or probes is not None:
            h = np.full_like(z, np.nan)
            h[ok] = np.log(z[ok]) / beta
            if keep_heights:
                heights[:, rec_idx, :] = h
            if probes is not None:
                if deriv is None:
                    deriv = 2j * np.pi * np.arange(m // 2 + 1)
                spec = rfft(np.where(np.isfinite(h), h, 0.0), axis=-1) / m * deriv
                cut = min(probes.cutoff, m // 2)
                vals = probes.pair(spec[:, : cut + 1])
                vals[failed] = np.nan
                probe_vals[:, rec_idx, :] = vals
        rec_idx += 1

    if record_steps[0] == 0:
        record()
    for step in range(1, n_steps + 1):
        dw = noise.increments(ensemble)
        z = _she_step_values(z, beta, mu, noise_grid_increment(dw, m))
        bad = (~np.all(np.isfinite(z), axis=1) | np.any(z <= 0, axis=1)) & ~failed
        if np.any(bad):
            failed |= bad
            z[failed] = np.nan
        while rec_idx < record_steps.size and record_steps[rec_idx] == step:
            record()
    return SheEnsembleResult(
        times=times,
        heights=heights,
        slope_probe_values=probe_vals,
        mean_series=mean_series,
        failed=failed,
        final=z,
    )
