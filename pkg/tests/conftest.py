import numpy as np
import pytest

from kpzlab.spectral import SpectralField


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_field(rng, cutoff, zero_mean=False, scale=1.0):
    half = (rng.standard_normal(cutoff + 1) + 1j * rng.standard_normal(cutoff + 1))
    half *= scale * np.sqrt(0.5)
    half[0] = rng.standard_normal() * scale
    return SpectralField.from_half(half, zero_mean=zero_mean)
