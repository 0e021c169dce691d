"""Time integration of the truncated growth dynamics.

Three systems share one integrator design:

* the gradient (Burgers-type) equation for u with dissipation
  -(-Laplacian)^alpha, nonlinear drift e^{-1} P_N d/dx F(e^{1/2} u) and
  mode-truncated conservative noise,
* the driven height equation for h1 with Laplacian, drift
  e^{-1} P_N F(e^{1/2} d/dx h1) and mode-truncated additive noise,
* the residual height equation for h2, noise-free, forced by the
  nonlinearity difference F(e^{1/2} d/dx (h1+h2)) - F(e^{1/2} d/dx h1),
  which is *not* re-projected to |k| <= N: the residual field is carried at
  the working-grid cutoff so the unprojected forcing is represented, and the
  induced mismatch against the projected dynamics is measured, not hidden.

Per Fourier mode the linear-plus-noise part is an Ornstein-Uhlenbeck
process and is advanced exactly (exact decay factor and exact step noise
variance), so the F = 0 dynamics is exactly stationary; the nonlinearity is
explicit with the phi1 exponential-integrator weight.  Noise increments per
complex mode have E|dW_k|^2 = 2 dt (covariance 2 delta delta), the k = 0
increment is real with variance 2 dt.  For the gradient equation the noise
operator is applied as d/dx (-Laplacian)^{(alpha-1)/2} (Fourier symbol
2 pi i k (2 pi |k|)^{alpha-1}): equal in law to (-Laplacian)^{alpha/2} and
exactly d/dx at alpha = 1, so the classical and fractional code paths
coincide bit for bit at alpha = 1.

Ensembles advance as one vectorized batch per step; increments for the whole
batch are drawn from a single deterministically seeded stream, so a run is a
pure function of (config, seed, F, initial data).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .measures import ProbeFamily
from .nonlinearity import NonlinearitySpec
from .spectral import (
    SpectralField,
    analyze,
    dealias_grid_size,
    grid_cutoff,
    synthesize,
)

OVERFLOW_GUARD = 1e12


class TrajectoryBlowup(RuntimeError):
    """A mode amplitude crossed the overflow guard; the trajectory aborts."""


@dataclass(frozen=True)
class SimulationConfig:
    """Truncation level, step sizes and seeding for one simulation.

    ``eps_n`` is pinned to pi/cutoff.  ``grid_oversample`` scales the grid
    used for pointwise nonlinearity evaluation relative to the minimal
    2*cutoff+1 points (exact dealiasing for quadratic F at the default 2).
    """

    cutoff: int
    dt: float
    horizon: float
    alpha: float = 1.0
    seed: int = 0
    grid_oversample: int = 2
    n_records: int = 11

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if not 0.5 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (1/2, 1], got {self.alpha}")
        if self.grid_oversample < 2:
            raise ValueError("grid_oversample must be >= 2")
        if self.n_records < 2:
            raise ValueError("need at least 2 record times")

    @property
    def eps_n(self) -> float:
        return np.pi / self.cutoff

    @property
    def grid_size(self) -> int:
        return dealias_grid_size(self.cutoff, self.grid_oversample)

    @property
    def residual_cutoff(self) -> int:
        """Working cutoff of the residual height field (grid resolution)."""
        return grid_cutoff(self.grid_size)

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    def record_steps(self) -> np.ndarray:
        return np.unique(np.round(np.linspace(0, self.n_steps, self.n_records)).astype(int))


def suggested_dt_bound(cfg: SimulationConfig, F: NonlinearitySpec, sup_u: float | None = None) -> float:
    """Advective stability heuristic for the explicit nonlinear term.

    The transport speed scale is e^{-1/2} L_F(e^{1/2} R) with R an estimate
    of sup|u|; the bound is 1/(2 pi N speed).  Exact-OU treatment of the
    linear part contributes no restriction."""
    if sup_u is None:
        sup_u = 3.0 * np.sqrt(2.0 * cfg.cutoff + 1.0)
    eps = cfg.eps_n
    speed = F.lipschitz_bound(np.sqrt(eps) * sup_u) / np.sqrt(eps)
    return 1.0 / (2.0 * np.pi * cfg.cutoff * max(speed, 1e-12))


@dataclass
class NoisePath:
    """Complex Brownian increment streams for modes k = 0..n_modes.

    ``increments(size)`` returns (size, n_modes+1) complex increments: the
    k = 0 column is real N(0, 2 dt), columns k >= 1 are complex with
    E|dW_k|^2 = 2 dt (independent across modes, Hermitian mirror implied).
    """

    n_modes: int
    dt: float
    rng: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int, n_modes: int, dt: float, stream: int = 0) -> "NoisePath":
        ss = np.random.SeedSequence(seed, spawn_key=(stream,))
        return cls(n_modes=n_modes, dt=dt, rng=np.random.default_rng(ss))

    def increments(self, size: int) -> np.ndarray:
        a = self.rng.standard_normal((size, self.n_modes + 1))
        b = self.rng.standard_normal((size, self.n_modes + 1))
        out = (a + 1j * b) * np.sqrt(self.dt)
        out[:, 0] = a[:, 0] * np.sqrt(2.0 * self.dt)
        return out


@dataclass(frozen=True)
class CoupledState:
    """Driven height h1 and residual height h2 at time t.

    h1 lives at the truncation cutoff; h2 may live at the finer working-grid
    cutoff once stepped (its unprojected forcing populates those modes)."""

    h1: SpectralField
    h2: SpectralField
    t: float = 0.0

    def total_height_half(self) -> np.ndarray:
        n = max(self.h1.cutoff, self.h2.cutoff)
        out = np.zeros(n + 1, dtype=complex)
        out[: self.h1.cutoff + 1] = self.h1.half()
        out[: self.h2.cutoff + 1] += self.h2.half()
        return out


def _ou_weights(lam: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact OU step factors: decay, phi1 nonlinear weight, noise gain.

    The noise gain g satisfies |m|^2 g^2 E|dW|^2 = |m|^2 (1-decay^2)/lam,
    i.e. g = sqrt((1 - e^{-2 lam dt})/(2 lam dt)), with the lam -> 0 limits
    (1, dt, 1)."""
    ld = lam * dt
    decay = np.exp(-ld)
    small = ld < 1e-12
    safe = np.where(small, 1.0, lam)
    wnl = np.where(small, dt, (1.0 - decay) / safe)
    gain = np.where(small, 1.0, np.sqrt((1.0 - decay ** 2) / (2.0 * safe * dt)))
    return decay, wnl, gain


class _BurgersKernel:
    """Precomputed per-mode factors for the gradient equation at one config."""

    def __init__(self, cfg: SimulationConfig, F: NonlinearitySpec):
        self.cfg = cfg
        self.F = F
        n = cfg.cutoff
        k = np.arange(n + 1, dtype=float)
        lam = (2.0 * np.pi * k) ** (2.0 * cfg.alpha)
        self.decay, self.wnl, gain = _ou_weights(lam, cfg.dt)
        # noise symbol 2 pi i k (2 pi k)^(alpha-1); zero mode carries no noise
        sym = np.zeros(n + 1, dtype=complex)
        sym[1:] = 2j * np.pi * k[1:] * (2.0 * np.pi * k[1:]) ** (cfg.alpha - 1.0)
        self.noise_mult = sym * gain
        self.deriv = 2j * np.pi * k
        self.m = cfg.grid_size
        self.inv_eps = 1.0 / cfg.eps_n
        self.sqrt_eps = np.sqrt(cfg.eps_n)

    def nonlinear(self, u_half: np.ndarray) -> np.ndarray:
        grid = synthesize(u_half, self.m)
        fvals = self.F.fn(self.sqrt_eps * grid) * self.inv_eps
        return self.deriv * analyze(fvals, self.cfg.cutoff)

    def step(self, u_half: np.ndarray, dw: np.ndarray) -> np.ndarray:
        out = self.decay * u_half + self.wnl * self.nonlinear(u_half) + self.noise_mult * dw
        out[..., 0] = 0.0  # gradient field: the mean stays pinned
        return out


class _KpzPairKernel:
    """Factors for the coupled height pair (driven h1, residual h2)."""

    def __init__(self, cfg: SimulationConfig, F: NonlinearitySpec):
        self.cfg = cfg
        self.F = F
        n = cfg.cutoff
        self.m = cfg.grid_size
        self.k2 = cfg.residual_cutoff
        k1 = np.arange(n + 1, dtype=float)
        k2 = np.arange(self.k2 + 1, dtype=float)
        lam1 = (2.0 * np.pi * k1) ** 2
        lam2 = (2.0 * np.pi * k2) ** 2
        self.decay1, self.wnl1, self.gain1 = _ou_weights(lam1, cfg.dt)
        self.decay2, self.wnl2, _ = _ou_weights(lam2, cfg.dt)
        self.deriv1 = 2j * np.pi * k1
        self.deriv2 = 2j * np.pi * k2
        self.inv_eps = 1.0 / cfg.eps_n
        self.sqrt_eps = np.sqrt(cfg.eps_n)

    def step(
        self, h1: np.ndarray, h2: np.ndarray, dw: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
        """Advance (h1, h2); also returns the residual-grid values of h2 and
        the rms unprojected forcing (the (P_N - I) F part) for diagnostics."""
        cfg = self.cfg
        slope1 = synthesize(self.deriv1 * h1, self.m)
        slope2 = synthesize(self.deriv2 * h2, self.m)
        f1 = self.F.fn(self.sqrt_eps * slope1) * self.inv_eps
        f_tot = self.F.fn(self.sqrt_eps * (slope1 + slope2)) * self.inv_eps

        f1_all = analyze(f1, self.k2)
        f1_low = f1_all[..., : cfg.cutoff + 1]
        # unprojected tail of F(d/dx h1): what P_N removes from the h1 drift
        # (failed trajectories carry NaN and are excluded)
        tail = f1_all[..., cfg.cutoff + 1:]
        if tail.size:
            with np.errstate(invalid="ignore"):
                residual = float(np.sqrt(np.nanmean(2.0 * np.abs(tail) ** 2)))
            if not np.isfinite(residual):
                residual = 0.0
        else:
            residual = 0.0

        diff = analyze(f_tot - f1, self.k2)
        new_h1 = self.decay1 * h1 + self.wnl1 * f1_low + self.gain1 * dw
        new_h2 = self.decay2 * h2 + self.wnl2 * diff
        h2_grid = synthesize(new_h2, self.m)
        return new_h1, new_h2, h2_grid, residual


def _guard(*arrays: np.ndarray) -> np.ndarray:
    """Rows (leading axis) that crossed the overflow guard or went nonfinite."""
    bad = None
    for a in arrays:
        flat = np.abs(a).reshape(a.shape[0], -1)
        b = ~np.all(np.isfinite(flat), axis=1) | (np.max(flat, axis=1) > OVERFLOW_GUARD)
        bad = b if bad is None else (bad | b)
    return bad


# --- public single-state operations ------------------------------------------


def step_burgers(
    u: SpectralField, cfg: SimulationConfig, F: NonlinearitySpec, dw
) -> SpectralField:
    """One exponential-integrator step of the gradient equation."""
    if u.cutoff != cfg.cutoff:
        raise ValueError(f"field cutoff {u.cutoff} != config cutoff {cfg.cutoff}")
    if not u.zero_mean:
        raise ValueError("gradient dynamics requires a zero-mean field")
    if isinstance(dw, NoisePath):
        dw = dw.increments(1)[0]
    kern = _BurgersKernel(cfg, F)
    out = kern.step(u.half()[None, :], np.asarray(dw)[None, :])[0]
    if not np.all(np.isfinite(out)) or np.max(np.abs(out)) > OVERFLOW_GUARD:
        raise TrajectoryBlowup(
            f"mode amplitude exceeded {OVERFLOW_GUARD:.0e}; reduce dt or check F"
        )
    return SpectralField.from_half(out, zero_mean=True)


def step_kpz_pair(
    s: CoupledState, cfg: SimulationConfig, F: NonlinearitySpec, dw
) -> CoupledState:
    """One step of the coupled height pair under a shared noise increment."""
    if s.h1.cutoff != cfg.cutoff:
        raise ValueError(f"h1 cutoff {s.h1.cutoff} != config cutoff {cfg.cutoff}")
    if isinstance(dw, NoisePath):
        dw = dw.increments(1)[0]
    kern = _KpzPairKernel(cfg, F)
    h2 = np.zeros(kern.k2 + 1, dtype=complex)
    h2[: s.h2.cutoff + 1] = s.h2.half()[: kern.k2 + 1]
    h1_new, h2_new, _, _ = kern.step(
        s.h1.half()[None, :], h2[None, :], np.asarray(dw)[None, :]
    )
    for arr in (h1_new, h2_new):
        if not np.all(np.isfinite(arr)) or np.max(np.abs(arr)) > OVERFLOW_GUARD:
            raise TrajectoryBlowup(
                f"mode amplitude exceeded {OVERFLOW_GUARD:.0e}; reduce dt or check F"
            )
    return CoupledState(
        h1=SpectralField.from_half(h1_new[0]),
        h2=SpectralField.from_half(h2_new[0]),
        t=s.t + cfg.dt,
    )


# --- ensemble runners ---------------------------------------------------------


@dataclass
class EnsembleResult:
    times: np.ndarray
    probe_values: np.ndarray  # (n_traj, n_times, n_probes)
    failed: np.ndarray  # (n_traj,) bool
    final_half: np.ndarray
    mode_snapshots: Optional[list] = None  # per record: (n_traj, cutoff) complex
    mode_means: Optional[np.ndarray] = None  # (n_times, cutoff) complex, ok rows
    mode_second_moments: Optional[np.ndarray] = None  # (n_times, cutoff)
    envelope_sup: Optional[np.ndarray] = None  # (n_traj,) running sup_x |h2|
    initial_sup: Optional[np.ndarray] = None  # (n_traj,) sup_x |h2(0)|
    residual_series: Optional[np.ndarray] = None  # (n_times,) mean unprojected forcing


def _expand_init(init_half: np.ndarray, ensemble: int) -> np.ndarray:
    init_half = np.asarray(init_half, dtype=complex)
    if init_half.ndim == 1:
        return np.tile(init_half, (ensemble, 1))
    if init_half.shape[0] != ensemble:
        raise ValueError(
            f"batched initial data has {init_half.shape[0]} rows, expected {ensemble}"
        )
    return init_half.copy()


def _warn_dt(cfg: SimulationConfig, F: NonlinearitySpec):
    bound = suggested_dt_bound(cfg, F)
    if cfg.dt > bound:
        warnings.warn(
            f"dt = {cfg.dt:g} exceeds the advective stability estimate {bound:.3g} "
            f"for F = {F.name} at cutoff {cfg.cutoff}",
            RuntimeWarning,
            stacklevel=3,
        )


def run_burgers_ensemble(
    cfg: SimulationConfig,
    F: NonlinearitySpec,
    init_half: np.ndarray,
    ensemble: int,
    probes: Optional[ProbeFamily] = None,
    noise: Optional[NoisePath] = None,
    increments_fn: Optional[Callable[[int], np.ndarray]] = None,
    collect_modes: bool = False,
    collect_mode_stats: bool = False,
) -> EnsembleResult:
    """Advance an ensemble of gradient fields, recording probe readings.

    ``collect_mode_stats`` records per-mode ensemble means and second moments
    at the sample times (cheap); ``collect_modes`` keeps full mode snapshots
    (memory scales with ensemble x records).  Trajectories that cross the
    overflow guard are tagged failed and carry NaN records from the failure
    step onward; the rest of the batch continues."""
    _warn_dt(cfg, F)
    kern = _BurgersKernel(cfg, F)
    u = _expand_init(init_half, ensemble)
    u[:, 0] = 0.0
    if noise is None:
        noise = NoisePath.from_seed(cfg.seed, cfg.cutoff, cfg.dt)
    rec = cfg.record_steps()
    times = rec * cfg.dt
    n_probes = len(probes.probes) if probes is not None else 0
    values = np.full((ensemble, rec.size, n_probes), np.nan)
    snapshots = [] if collect_modes else None
    means = np.full((rec.size, cfg.cutoff), np.nan, dtype=complex) if collect_mode_stats else None
    seconds = np.full((rec.size, cfg.cutoff), np.nan) if collect_mode_stats else None
    failed = np.zeros(ensemble, dtype=bool)

    rec_idx = 0

    def record():
        nonlocal rec_idx
        ok = ~failed
        if probes is not None:
            vals = probes.pair(u)
            vals[failed] = np.nan
            values[:, rec_idx, :] = vals
        if collect_modes:
            snap = u[:, 1:].copy()
            snap[failed] = np.nan
            snapshots.append(snap)
        if collect_mode_stats and np.any(ok):
            means[rec_idx] = np.mean(u[ok, 1:], axis=0)
            seconds[rec_idx] = np.mean(np.abs(u[ok, 1:]) ** 2, axis=0)
        rec_idx += 1

    if rec[0] == 0:
        record()
    for step in range(1, cfg.n_steps + 1):
        dw = noise.increments(ensemble) if increments_fn is None else increments_fn(step - 1)
        u = kern.step(u, dw)
        bad = _guard(u) & ~failed
        if np.any(bad):
            failed |= bad
            u[failed] = np.nan
        while rec_idx < rec.size and rec[rec_idx] == step:
            record()
    return EnsembleResult(
        times=times,
        probe_values=values,
        failed=failed,
        final_half=u,
        mode_snapshots=snapshots,
        mode_means=means,
        mode_second_moments=seconds,
    )


def run_burgers_pair_ensemble(
    cfg: SimulationConfig,
    F: NonlinearitySpec,
    init_a: np.ndarray,
    init_b: np.ndarray,
    ensemble: int,
    probes: ProbeFamily,
    noise: Optional[NoisePath] = None,
    increments_fn: Optional[Callable[[int], np.ndarray]] = None,
) -> tuple[EnsembleResult, EnsembleResult]:
    """Two ensembles advanced under one common noise path per pair."""
    _warn_dt(cfg, F)
    kern = _BurgersKernel(cfg, F)
    ua = _expand_init(init_a, ensemble)
    ub = _expand_init(init_b, ensemble)
    ua[:, 0] = 0.0
    ub[:, 0] = 0.0
    if noise is None:
        noise = NoisePath.from_seed(cfg.seed, cfg.cutoff, cfg.dt)
    rec = cfg.record_steps()
    times = rec * cfg.dt
    va = np.full((ensemble, rec.size, len(probes.probes)), np.nan)
    vb = np.full_like(va, np.nan)
    failed = np.zeros(ensemble, dtype=bool)
    rec_idx = 0

    def record():
        nonlocal rec_idx
        pa, pb = probes.pair(ua), probes.pair(ub)
        pa[failed] = np.nan
        pb[failed] = np.nan
        va[:, rec_idx, :] = pa
        vb[:, rec_idx, :] = pb
        rec_idx += 1

    if rec[0] == 0:
        record()
    for step in range(1, cfg.n_steps + 1):
        dw = noise.increments(ensemble) if increments_fn is None else increments_fn(step - 1)
        ua = kern.step(ua, dw)
        ub = kern.step(ub, dw)
        bad = (_guard(ua) | _guard(ub)) & ~failed
        if np.any(bad):
            failed |= bad
            ua[failed] = np.nan
            ub[failed] = np.nan
        while rec_idx < rec.size and rec[rec_idx] == step:
            record()
    res_a = EnsembleResult(times, va, failed.copy(), ua)
    res_b = EnsembleResult(times, vb, failed.copy(), ub)
    return res_a, res_b


def run_kpz_pair_ensemble(
    cfg: SimulationConfig,
    F: NonlinearitySpec,
    h1_init: np.ndarray,
    h2_init: np.ndarray,
    ensemble: int,
    probes: ProbeFamily,
    noise: Optional[NoisePath] = None,
    increments_fn: Optional[Callable[[int], np.ndarray]] = None,
) -> EnsembleResult:
    """Coupled height-pair ensemble; probes read the total slope field.

    Tracks sup_x |h2| along every trajectory (running max over all steps on
    the working grid) and the mean unprojected-forcing magnitude."""
    _warn_dt(cfg, F)
    kern = _KpzPairKernel(cfg, F)
    h1 = _expand_init(h1_init, ensemble)
    h2_small = _expand_init(h2_init, ensemble)
    h2 = np.zeros((ensemble, kern.k2 + 1), dtype=complex)
    h2[:, : h2_small.shape[1]] = h2_small
    if noise is None:
        noise = NoisePath.from_seed(cfg.seed, cfg.cutoff, cfg.dt)
    rec = cfg.record_steps()
    times = rec * cfg.dt
    values = np.full((ensemble, rec.size, len(probes.probes)), np.nan)
    residuals = np.zeros(rec.size)
    failed = np.zeros(ensemble, dtype=bool)

    h2_grid0 = synthesize(h2, kern.m)
    initial_sup = np.max(np.abs(h2_grid0), axis=1)
    envelope = initial_sup.copy()

    def slope_total():
        total = np.zeros_like(h2)
        total[:, : cfg.cutoff + 1] = h1
        total += h2
        return kern.deriv2 * total

    rec_idx = 0
    last_residual = 0.0

    def record():
        nonlocal rec_idx
        vals = probes.pair(slope_total())
        vals[failed] = np.nan
        values[:, rec_idx, :] = vals
        residuals[rec_idx] = last_residual
        rec_idx += 1

    if rec[0] == 0:
        record()
    for step in range(1, cfg.n_steps + 1):
        dw = noise.increments(ensemble) if increments_fn is None else increments_fn(step - 1)
        h1, h2, h2_grid, last_residual = kern.step(h1, h2, dw)
        bad = (_guard(h1) | _guard(h2)) & ~failed
        if np.any(bad):
            failed |= bad
            h1[failed] = np.nan
            h2[failed] = np.nan
        sup = np.max(np.abs(h2_grid), axis=1)
        ok = ~failed
        envelope[ok] = np.maximum(envelope[ok], sup[ok])
        while rec_idx < rec.size and rec[rec_idx] == step:
            record()
    return EnsembleResult(
        times=times,
        probe_values=values,
        failed=failed,
        final_half=h2,
        envelope_sup=envelope,
        initial_sup=initial_sup,
        residual_series=residuals,
    )


# --- trajectory recorder -------------------------------------------------------


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Recorded probe readings <u(t), phi> with provenance metadata."""

    times: np.ndarray
    probe_ids: tuple[str, ...]
    values: np.ndarray  # (n_traj, n_times, n_probes)
    failed: np.ndarray  # (n_traj,)
    meta: dict

    @property
    def n_traj(self) -> int:
        return self.values.shape[0]

    def rows(self):
        """(trajectory_id, time, probe_id, value) rows, fixed order."""
        for i in range(self.values.shape[0]):
            for j, t in enumerate(self.times):
                for p, pid in enumerate(self.probe_ids):
                    yield i, float(t), pid, float(self.values[i, j, p])

    def summary_moments(self) -> dict:
        ok = ~self.failed
        vals = self.values[ok]
        return {
            "n_traj": int(self.values.shape[0]),
            "n_failed": int(self.failed.sum()),
            "probe_mean_final": vals[:, -1, :].mean(axis=0).tolist() if vals.size else [],
            "probe_var_final": vals[:, -1, :].var(axis=0).tolist() if vals.size else [],
        }


def simulate(
    cfg: SimulationConfig,
    init,
    F: NonlinearitySpec,
    probes: ProbeFamily,
    ensemble: int = 1,
) -> TrajectoryEnsemble:
    """Advance to the horizon, recording probe readings at the sample times.

    ``init`` is either a zero-mean :class:`SpectralField` (gradient dynamics)
    or a :class:`CoupledState` (height pair; probes read the total slope).
    Deterministic given (cfg, F, init): noise derives from cfg.seed.
    Trajectory failures are tagged, not raised."""
    if probes is None or not probes.probes:
        raise ValueError("probes must be a nonempty family")
    if isinstance(init, SpectralField):
        if not init.zero_mean:
            raise ValueError("gradient dynamics needs zero-mean initial data")
        res = run_burgers_ensemble(
            cfg, F, init.half(), ensemble, probes=probes
        )
    elif isinstance(init, CoupledState):
        h2 = init.h2.half()
        res = run_kpz_pair_ensemble(
            cfg, F, init.h1.half(), h2, ensemble, probes=probes
        )
    else:
        raise TypeError(f"init must be SpectralField or CoupledState, got {type(init)}")
    meta = {
        "cutoff": cfg.cutoff,
        "dt": cfg.dt,
        "horizon": cfg.horizon,
        "alpha": cfg.alpha,
        "seed": cfg.seed,
        "grid_oversample": cfg.grid_oversample,
        "nonlinearity": F.name,
        "ensemble": ensemble,
        "kind": "burgers" if isinstance(init, SpectralField) else "kpz_pair",
    }
    return TrajectoryEnsemble(
        times=res.times,
        probe_ids=probes.probe_ids,
        values=res.probe_values,
        failed=res.failed,
        meta=meta,
    )


def boltzmann_gibbs_sum(alpha: float, n: int) -> float:
    """S(alpha, N) = sum over 1 <= |k1|,|k2| <= N of (|k1|^a + |k2|^a)^-2."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if n < 1:
        raise ValueError("N must be >= 1")
    a = np.arange(1, n + 1, dtype=float) ** alpha
    return float(4.0 * np.sum((a[:, None] + a[None, :]) ** -2.0))
