"""Relative entropy and Wasserstein machinery on finite surrogates.

Relative entropy H(P|Q) = sum p_i log(p_i / q_i) on finite supports, the
entropy inequality and pushforward contraction it obeys, a Gaussian
product-measure surrogate for the relative entropy of per-mode ensembles,
a one-coupling upper bound for the Wasserstein distance restricted to a
probe dictionary, and exponential decay-rate fitting.

Probes are C^1 test functions on the torus normalized into the unit ball
max(sup|phi|, sup|phi'|) <= 1, so |<u1 - u2, phi>| <= sup|h1 - h2| whenever
u_i are gradients of h_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .spectral import analyze, synthesize

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class FiniteMeasure:
    """Probability weights on a finite support {0..n-1}."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-d array")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > NORMALIZATION_TOL * max(1.0, w.size):
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.size

    @classmethod
    def from_unnormalized(cls, w: np.ndarray) -> "FiniteMeasure":
        w = np.asarray(w, dtype=float)
        return cls(w / w.sum())


def relative_entropy(p1: FiniteMeasure, p2: FiniteMeasure) -> float:
    """sum p1 log(p1/p2) with 0 log 0 = 0; +inf without absolute continuity."""
    if p1.n != p2.n:
        raise ValueError(f"support sizes differ: {p1.n} vs {p2.n}")
    a, b = p1.weights, p2.weights
    if np.any((a > 0) & (b == 0)):
        return float("inf")
    mask = a > 0
    return float(np.sum(a[mask] * np.log(a[mask] / b[mask])))


@dataclass(frozen=True)
class EntropyInequalityReport:
    lhs: float
    rhs: float
    holds: bool


def entropy_inequality_bound(
    p1: FiniteMeasure, p2: FiniteMeasure, event: Sequence[int]
) -> EntropyInequalityReport:
    """P1(E) <= (log 2 + H(P1|P2)) / log(1 + 1/P2(E)).

    Rare events under P2 stay explicitly rare under P1 when the relative
    entropy is bounded."""
    event = np.asarray(event, dtype=int)
    p2_event = float(p2.weights[event].sum())
    if p2_event <= 0:
        raise ValueError("event has zero probability under the reference measure")
    lhs = float(p1.weights[event].sum())
    rhs = (np.log(2.0) + relative_entropy(p1, p2)) / np.log1p(1.0 / p2_event)
    return EntropyInequalityReport(lhs=lhs, rhs=float(rhs), holds=bool(lhs <= rhs + 1e-12))


def pushforward(p: FiniteMeasure, index_map: Sequence[int], size: int | None = None) -> FiniteMeasure:
    """Image measure under a map given pointwise on the support."""
    index_map = np.asarray(index_map, dtype=int)
    if index_map.shape != (p.n,):
        raise ValueError("index_map must assign an image to every support point")
    m = int(index_map.max()) + 1 if size is None else size
    w = np.zeros(m)
    np.add.at(w, index_map, p.weights)
    return FiniteMeasure(w)


@dataclass(frozen=True)
class ContractionReport:
    pushed_entropy: float
    entropy: float
    holds: bool


def contraction_check(
    p1: FiniteMeasure, p2: FiniteMeasure, index_map: Sequence[int]
) -> ContractionReport:
    """Verify H(T_* P1 | T_* P2) <= H(P1 | P2) for the given map T."""
    size = int(np.max(index_map)) + 1
    h_pushed = relative_entropy(pushforward(p1, index_map, size), pushforward(p2, index_map, size))
    h = relative_entropy(p1, p2)
    return ContractionReport(
        pushed_entropy=h_pushed, entropy=h, holds=bool(h_pushed <= h + 1e-12)
    )


def gaussian_kl_from_moments(second_moments: np.ndarray, reference_variance: float) -> float:
    """Relative entropy between centered complex Gaussian product measures
    with the given per-mode second moments and a common reference variance:
    sum_k (v_k/s - 1 - log(v_k/s))/2."""
    v = np.asarray(second_moments, dtype=float)
    if reference_variance <= 0:
        raise ValueError("reference variance must be positive")
    if np.any(v <= 0):
        raise ValueError("degenerate (zero) sample variance in some mode")
    r = v / reference_variance
    return float(np.sum(0.5 * (r - 1.0 - np.log(r))))


def gaussian_mode_kl(sample_modes: np.ndarray, reference_variance: float) -> float:
    """Product-Gaussian surrogate for the relative entropy of a mode ensemble.

    Fits a centered complex Gaussian to each mode's empirical law via the
    second moment v_k and returns sum_k (v_k/s - 1 - log(v_k/s)))/2 with
    s the reference variance: the exact relative entropy between the fitted
    product measure and the reference product measure.
    """
    z = np.asarray(sample_modes)
    if z.ndim == 1:
        z = z[:, None]
    n_samples = z.shape[0]
    if n_samples < 100:
        raise ValueError(f"need >= 100 samples per mode, got {n_samples}")
    v = np.mean(np.abs(z) ** 2, axis=0)
    return gaussian_kl_from_moments(v, reference_variance)


# --- probe dictionary --------------------------------------------------------


@dataclass(frozen=True)
class Probe:
    """One test function with its spectrum (modes 0..cutoff) and sup norms."""

    probe_id: str
    coeffs_half: np.ndarray
    sup_norm: float
    sup_deriv_norm: float

    def __post_init__(self):
        c = np.asarray(self.coeffs_half, dtype=complex).copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs_half", c)
        if max(self.sup_norm, self.sup_deriv_norm) > 1.0 + 1e-12:
            raise ValueError(f"probe {self.probe_id} is outside the unit C^1 ball")

    @property
    def cutoff(self) -> int:
        return self.coeffs_half.size - 1


def trig_probe(kind: str, k: int, weight: float | None = None) -> Probe:
    """sin/cos probe at wavenumber k, scaled into the unit C^1 ball.

    The raw probe is sqrt(2) sin(2 pi k x) w (resp. cos); its sup norm is
    sqrt(2) w and its derivative sup norm sqrt(2) w 2 pi k, and the final
    amplitude divides out whichever is larger.
    """
    if k < 1:
        raise ValueError("trig probes need k >= 1")
    w = 1.0 / (1.0 + 2.0 * np.pi * k) if weight is None else weight
    amp = np.sqrt(2.0) * w
    scale = max(amp, amp * 2.0 * np.pi * k)
    if scale > 1.0:
        amp /= scale
    half = np.zeros(k + 1, dtype=complex)
    if kind == "sin":
        # a sin(2 pi k x) = (a/2i) e^{2 pi i k x} + conj mode
        half[k] = amp / 2j
    elif kind == "cos":
        half[k] = amp / 2
    else:
        raise ValueError(f"kind must be 'sin' or 'cos', got {kind!r}")
    return Probe(
        probe_id=f"{kind}:{k}",
        coeffs_half=half,
        sup_norm=amp,
        sup_deriv_norm=amp * 2.0 * np.pi * k,
    )


def constant_probe() -> Probe:
    return Probe("const", np.array([1.0 + 0j]), 1.0, 0.0)


@dataclass(frozen=True)
class ProbeFamily:
    probes: tuple[Probe, ...]

    def __post_init__(self):
        if not self.probes:
            raise ValueError("probe family must be nonempty")

    @property
    def probe_ids(self) -> tuple[str, ...]:
        return tuple(p.probe_id for p in self.probes)

    @property
    def cutoff(self) -> int:
        return max(p.cutoff for p in self.probes)

    def matrix(self, n_modes: int) -> np.ndarray:
        """(n_probes, n_modes+1) spectra, zero-padded or truncated."""
        out = np.zeros((len(self.probes), n_modes + 1), dtype=complex)
        for i, p in enumerate(self.probes):
            upto = min(p.cutoff, n_modes) + 1
            out[i, :upto] = p.coeffs_half[:upto]
        return out

    def pair(self, half: np.ndarray) -> np.ndarray:
        """<u, phi> for every probe; ``half`` holds modes 0..K, batched.

        The pairing is the L2(T) inner product, evaluated in spectrum:
        Re(c_0 conj(phi_0) + 2 sum_{k>=1} c_k conj(phi_k)).
        """
        half = np.asarray(half)
        k = half.shape[-1] - 1
        phi = self.matrix(k)
        weights = np.full(k + 1, 2.0)
        weights[0] = 1.0
        return np.real(half @ (weights * np.conj(phi)).T)


def default_probe_family(max_k: int = 8) -> ProbeFamily:
    probes = []
    for k in range(1, max_k + 1):
        probes.append(trig_probe("sin", k))
        probes.append(trig_probe("cos", k))
    return ProbeFamily(tuple(probes))


def wasserstein_coupled_bound(values_a: np.ndarray, values_b: np.ndarray) -> float:
    """One-coupling upper bound on the probe-restricted Wasserstein distance.

    ``values_a`` and ``values_b`` hold probe readings <u^i, phi_p> of coupled
    pairs, shape (n_pairs, n_probes), produced under a common noise path per
    pair.  Averaging the per-pair sup over the dictionary evaluates one
    admissible coupling, hence upper-bounds the infimum over all couplings.
    """
    a = np.atleast_2d(np.asarray(values_a, dtype=float))
    b = np.atleast_2d(np.asarray(values_b, dtype=float))
    if a.shape != b.shape:
        raise ValueError(f"coupled ensembles differ in shape: {a.shape} vs {b.shape}")
    return float(np.mean(np.max(np.abs(a - b), axis=-1)))


# --- decay fitting -----------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    rate: float
    residual: float

    @property
    def c(self) -> float:
        return self.rate


def fit_exponential_decay(times: np.ndarray, values: np.ndarray) -> DecayFit:
    """Least-squares fit of log(values) against t; returns C = -slope and the
    RMS residual of the fit in log space."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or t.ndim != 1:
        raise ValueError("times and values must be equal-length 1-d arrays")
    if t.size < 4:
        raise ValueError("need at least 4 time points")
    if np.any(v <= 0):
        raise ValueError("values must be positive to fit an exponential")
    logv = np.log(v)
    slope, intercept = np.polyfit(t, logv, 1)
    resid = logv - (slope * t + intercept)
    return DecayFit(rate=float(-slope), residual=float(np.sqrt(np.mean(resid ** 2))))


@dataclass(frozen=True)
class EntropyReport:
    """Per-time surrogate relative entropy with a fitted decay rate."""

    times: np.ndarray
    surrogate_entropy: np.ndarray
    fitted_rate: float
    fit_residual: float
    mc_floor: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).copy()
        s = np.asarray(self.surrogate_entropy, dtype=float).copy()
        if t.shape != s.shape:
            raise ValueError("times and entropies must align")
        if np.any(s < 0):
            raise ValueError("surrogate entropy must be nonnegative")
        if not np.isfinite(self.fitted_rate):
            raise ValueError("fitted rate must be finite")
        t.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "surrogate_entropy", s)

    def to_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "surrogate_entropy": self.surrogate_entropy.tolist(),
            "fitted_rate": self.fitted_rate,
            "fit_residual": self.fit_residual,
            "mc_floor": self.mc_floor,
        }
