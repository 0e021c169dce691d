"""Real scalar fields on the unit torus T = R/Z in Fourier representation.

A field u(x) = sum_{|k| <= N} c_k exp(2 pi i k x) is stored through its
complex coefficients c_k with the Hermitian constraint c_{-k} = conj(c_k),
so u is real valued.  The forward grid transform divides by the grid size,
which makes the stored coefficients function-space Fourier coefficients:
Parseval reads sum_k |c_k|^2 = (1/M) sum_j u(x_j)^2 for any grid with
M >= 2N+1 points.

Nonlinear terms are evaluated pointwise on oversampled grids (factor >= 2
over the minimal 2N+1 points); for quadratic nonlinearities that grid is
exactly dealiasing, for general nonlinearities it is an accuracy knob.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class SpectralField:
    """Band-limited real field, coefficients indexed k in {-cutoff..cutoff}.

    ``coeffs[i]`` holds the coefficient of exp(2 pi i (i - cutoff) x), i.e.
    the array is in centered order.  ``zero_mean`` pins the k = 0 mode to 0
    (gradient-type fields).
    """

    cutoff: int
    coeffs: np.ndarray
    zero_mean: bool = False

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError(f"cutoff must be >= 0, got {self.cutoff}")
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (2 * self.cutoff + 1,):
            raise ValueError(
                f"coeffs must have shape ({2 * self.cutoff + 1},), got {c.shape}"
            )
        herm = np.max(np.abs(c - np.conj(c[::-1]))) if c.size else 0.0
        if herm > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(c)))):
            raise ValueError(f"coefficients break Hermitian symmetry by {herm:.3e}")
        if self.zero_mean and abs(c[self.cutoff]) > HERMITIAN_TOL:
            raise ValueError("zero_mean field has a nonzero k=0 coefficient")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, cutoff: int, zero_mean: bool = False) -> "SpectralField":
        return cls(cutoff, np.zeros(2 * cutoff + 1, dtype=complex), zero_mean)

    @classmethod
    def from_half(cls, half: np.ndarray, zero_mean: bool = False) -> "SpectralField":
        """Build from modes k = 0..K (negative modes by conjugation)."""
        half = np.asarray(half, dtype=complex)
        k = half.shape[-1] - 1
        full = np.concatenate([np.conj(half[:0:-1]), half])
        full[k] = full[k].real  # k = 0 coefficient of a real field
        if zero_mean:
            full[k] = 0.0
        return cls(k, full, zero_mean)

    def half(self) -> np.ndarray:
        """Modes k = 0..cutoff (the field is determined by these)."""
        return self.coeffs[self.cutoff:].copy()

    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.cutoff, self.cutoff + 1)

    def coeff(self, k: int) -> complex:
        if abs(k) > self.cutoff:
            return 0.0 + 0.0j
        return complex(self.coeffs[k + self.cutoff])


@dataclass(frozen=True)
class GridField:
    """Real samples at the equispaced points x_j = j / size."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("values must be a 1-d array with at least 2 points")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.size


def project_uv(f: SpectralField, n: int) -> SpectralField:
    """Keep modes |k| <= n, drop the rest.  Identity when n >= f.cutoff."""
    if n < 0:
        raise ValueError(f"projection cutoff must be >= 0, got {n}")
    if n >= f.cutoff:
        return f
    lo, hi = f.cutoff - n, f.cutoff + n + 1
    return SpectralField(n, f.coeffs[lo:hi], f.zero_mean)


def derivative(f: SpectralField) -> SpectralField:
    """Exact spectral derivative: c_k -> 2 pi i k c_k.  Output is zero mean."""
    mult = 2j * np.pi * f.wavenumbers()
    return SpectralField(f.cutoff, mult * f.coeffs, zero_mean=True)


def fractional_dissipation(f: SpectralField, alpha: float, power: float) -> SpectralField:
    """Apply the Fourier symbol of (-Laplacian)^(alpha*power).

    ``power`` selects the full operator (1) or its square root (1/2); the
    multiplier is (2 pi |k|)^(2 alpha power), zero on the k = 0 mode.  The
    caller supplies the sign when using this as a dissipative term.
    """
    if not 0.5 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (1/2, 1], got {alpha}")
    if power not in (1.0, 0.5, 1, 2):
        if not np.isclose(power, 1.0) and not np.isclose(power, 0.5):
            raise ValueError(f"power must be 1 or 1/2, got {power}")
    mult = (2.0 * np.pi * np.abs(f.wavenumbers())) ** (2.0 * alpha * power)
    return SpectralField(f.cutoff, mult * f.coeffs, f.zero_mean)


def to_grid(f: SpectralField, m: int) -> GridField:
    """Evaluate the trigonometric polynomial at x_j = j/m, j = 0..m-1."""
    if m < 2 * f.cutoff + 1:
        raise ValueError(
            f"grid size {m} < 2*cutoff+1 = {2 * f.cutoff + 1}: evaluation would alias"
        )
    return GridField(synthesize(f.half(), m))


def from_grid(g: GridField, n: int) -> SpectralField:
    """Fourier coefficients of the sampled field, truncated to |k| <= n."""
    m = g.size
    if n > (m - 1) // 2:
        raise ValueError(
            f"cutoff {n} not resolvable on a grid of {m} points (need m >= 2n+1)"
        )
    half = analyze(g.values, n)
    return SpectralField.from_half(half)


def dealias_grid_size(cutoff: int, oversample: int = 2) -> int:
    """FFT-friendly grid size >= oversample * (2*cutoff + 1)."""
    if oversample < 2:
        raise ValueError("oversample must be >= 2")
    return next_fast_len(oversample * (2 * cutoff + 1), real=True)


def grid_cutoff(m: int) -> int:
    """Largest mode index representable without the ambiguous Nyquist bin."""
    return (m - 1) // 2


# --- array-level fast paths -------------------------------------------------
#
# These operate on "half spectra": complex arrays whose last axis holds the
# modes k = 0..K of a real field.  They are the workhorses of the time
# steppers, which batch whole ensembles along the leading axes.


def synthesize(half: np.ndarray, m: int) -> np.ndarray:
    """Grid values (last axis length m) from modes 0..K, batched."""
    half = np.asarray(half, dtype=complex)
    k = half.shape[-1] - 1
    if m < 2 * k + 1:
        raise ValueError(f"grid size {m} too small for cutoff {k}")
    spec = np.zeros(half.shape[:-1] + (m // 2 + 1,), dtype=complex)
    spec[..., : k + 1] = half * m
    return irfft(spec, n=m, axis=-1)


def analyze(values: np.ndarray, n_modes: int) -> np.ndarray:
    """Modes 0..n_modes of real grid samples, batched; divides by grid size."""
    values = np.asarray(values, dtype=float)
    m = values.shape[-1]
    if n_modes > (m - 1) // 2:
        raise ValueError(f"cutoff {n_modes} not resolvable on {m} points")
    return rfft(values, axis=-1)[..., : n_modes + 1] / m


def field_allclose(f: SpectralField, g: SpectralField, tol: float = 1e-12) -> bool:
    """Equality as functions: aligned coefficients agree, extra modes vanish."""
    n = max(f.cutoff, g.cutoff)
    a = np.zeros(2 * n + 1, dtype=complex)
    b = np.zeros(2 * n + 1, dtype=complex)
    a[n - f.cutoff: n + f.cutoff + 1] = f.coeffs
    b[n - g.cutoff: n + g.cutoff + 1] = g.coeffs
    scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    return bool(np.max(np.abs(a - b)) <= tol * scale)
