"""Scalar nonlinearities, their Gaussian L2 diagnostics, and the homogenized
quadratic coefficient.

The effective coefficient of a nonlinearity F is

    beta(F) = (1/2) E[F(X) (X^2 - 1)],   X ~ N(0, 1),

which equals (1/2) E[F''(X)] by Gaussian integration by parts without ever
differentiating F.  Expectations are computed with Gauss-Hermite quadrature
mapped to the standard Gaussian weight.  Probabilists' Hermite polynomials
are used throughout: He_0 = 1, He_1 = x, He_2 = x^2 - 1, with
E[He_m He_n] = m! delta_{mn}.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import roots_hermite


class QuadratureDivergence(RuntimeError):
    """Doubling the quadrature order moved the result by more than the
    tolerance; the integrand is likely not square integrable against the
    Gaussian weight (or needs a much finer rule)."""


@dataclass(frozen=True)
class NonlinearitySpec:
    """A scalar function F with the metadata the steppers and tests need.

    ``fn`` must accept numpy arrays.  ``lipschitz_bound`` maps a radius R to
    a Lipschitz constant of F on [-R, R].  ``known_beta`` is an exact value
    of the homogenized coefficient when one exists, used by tests.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    lipschitz_bound: Callable[[float], float]
    known_beta: Optional[float] = None

    def __call__(self, x):
        return self.fn(x)


@dataclass(frozen=True)
class HermiteExpansion:
    """Coefficients c_m = E[F He_m] / m! of a Hermite series up to order M.

    ``l2_norm_sq`` is the quadrature estimate of E[F^2] and ``tail_norm_sq``
    the part of it not captured by the first M+1 terms (sum m! c_m^2)."""

    order: int
    coeffs: np.ndarray
    l2_norm_sq: float
    tail_norm_sq: float


@dataclass(frozen=True)
class GaussianL2Report:
    norm_f: float
    norm_f_prime: float
    passed: bool
    rel_change_f: float
    rel_change_f_prime: float


@lru_cache(maxsize=8)
def gauss_hermite_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights such that sum(w * g(x)) approximates E[g(X)], X ~ N(0,1)."""
    if order < 1:
        raise ValueError("quadrature order must be positive")
    x, w = roots_hermite(order)
    return np.sqrt(2.0) * x, w / np.sqrt(np.pi)


def _gauss_expectation(fn, order: int) -> float:
    x, w = gauss_hermite_rule(order)
    return float(np.sum(w * fn(x)))


def effective_beta(
    F: NonlinearitySpec,
    quad_order: int = 256,
    tol: float = 1e-6,
    check: bool = True,
) -> float:
    """Homogenized coefficient (1/2) E[F(X)(X^2 - 1)] by quadrature.

    With ``check`` on, the order is doubled and a shift larger than ``tol``
    raises :class:`QuadratureDivergence`.  Kinked F (like |x|) converge only
    like 1/order, so pass a large ``quad_order`` for tight tolerances.
    """
    if quad_order < 32:
        raise ValueError("quad_order must be >= 32")
    integrand = lambda x: 0.5 * F.fn(x) * (x * x - 1.0)
    value = _gauss_expectation(integrand, quad_order)
    if check:
        refined = _gauss_expectation(integrand, 2 * quad_order)
        if not np.isfinite(value) or abs(refined - value) > tol * max(1.0, abs(value)):
            raise QuadratureDivergence(
                f"beta({F.name}) moved by {abs(refined - value):.3e} when doubling "
                f"order {quad_order}; F may not be square integrable"
            )
    return value


def gaussian_l2_check(
    F: NonlinearitySpec,
    quad_order: int = 256,
    rtol: float = 1e-6,
    fd_step: float = 1e-6,
) -> GaussianL2Report:
    """Estimate E[F^2] and E[(F')^2] and flag instability under refinement.

    The derivative is a central finite difference, so F need not be smooth.
    Divergent integrands (e.g. exp(x^2)) show up as large relative change
    between the order-q and order-2q rules and yield ``passed = False``
    rather than an exception.
    """
    fsq = lambda x: F.fn(x) ** 2
    dfsq = lambda x: ((F.fn(x + fd_step) - F.fn(x - fd_step)) / (2.0 * fd_step)) ** 2

    out = []
    with np.errstate(over="ignore", invalid="ignore"):
        for g in (fsq, dfsq):
            coarse = _gauss_expectation(g, quad_order)
            fine = _gauss_expectation(g, 2 * quad_order)
            rel = abs(fine - coarse) / max(1.0, abs(fine))
            if not (np.isfinite(coarse) and np.isfinite(fine)):
                rel = np.inf
            out.append((fine, rel))
    (nf2, rel_f), (nd2, rel_d) = out
    finite = np.isfinite(nf2) and np.isfinite(nd2) and nf2 >= 0 and nd2 >= 0
    passed = bool(finite and rel_f <= rtol and rel_d <= rtol)
    return GaussianL2Report(
        norm_f=float(np.sqrt(max(nf2, 0.0))),
        norm_f_prime=float(np.sqrt(max(nd2, 0.0))),
        passed=passed,
        rel_change_f=float(rel_f),
        rel_change_f_prime=float(rel_d),
    )


def hermite_coefficients(
    F: NonlinearitySpec,
    order: int,
    quad_order: int | None = None,
    beta_tol: float = 1e-8,
) -> HermiteExpansion:
    """Projections c_m = E[F He_m] / m! for m = 0..order.

    The c_2 entry must reproduce ``effective_beta`` computed with the same
    rule (beta = (1/2) E[F He_2] = c_2 with this normalization); that
    identity is asserted here.
    """
    if order < 2:
        raise ValueError("expansion order must be >= 2")
    if quad_order is None:
        quad_order = max(256, 4 * order)
    x, w = gauss_hermite_rule(quad_order)
    fx = F.fn(x)

    coeffs = np.empty(order + 1)
    he_prev = np.ones_like(x)
    he = x.copy()
    coeffs[0] = np.sum(w * fx)
    if order >= 1:
        coeffs[1] = np.sum(w * fx * he)
    fact = 1.0
    for m in range(2, order + 1):
        he_prev, he = he, x * he - (m - 1) * he_prev
        fact *= m
        coeffs[m] = np.sum(w * fx * he) / fact

    beta = effective_beta(F, quad_order=quad_order, check=False)
    if abs(coeffs[2] - beta) > beta_tol * max(1.0, abs(beta)):
        raise AssertionError(
            f"c_2 = {coeffs[2]!r} disagrees with beta = {beta!r} for {F.name}"
        )

    l2 = float(np.sum(w * fx * fx))
    captured = 0.0
    fact = 1.0
    for m in range(order + 1):
        if m > 0:
            fact *= m
        captured += fact * coeffs[m] ** 2
    return HermiteExpansion(
        order=order,
        coeffs=coeffs,
        l2_norm_sq=l2,
        tail_norm_sq=float(l2 - captured),
    )


def _abs_smooth(delta: float):
    def fn(x):
        return np.sqrt(x * x + delta * delta) - delta

    return fn


BATTERY: dict[str, NonlinearitySpec] = {
    "square": NonlinearitySpec(
        "square", lambda x: x * x, lambda r: 2.0 * r, known_beta=1.0
    ),
    "abs": NonlinearitySpec(
        "abs", np.abs, lambda r: 1.0, known_beta=0.5 * np.sqrt(2.0 / np.pi)
    ),
    "identity": NonlinearitySpec(
        "identity", lambda x: np.asarray(x, dtype=float), lambda r: 1.0, known_beta=0.0
    ),
    "cubic": NonlinearitySpec(
        "cubic", lambda x: x ** 3, lambda r: 3.0 * r * r, known_beta=0.0
    ),
    "square_plus_cubic": NonlinearitySpec(
        "square_plus_cubic",
        lambda x: x * x + 0.1 * x ** 3,
        lambda r: 2.0 * r + 0.3 * r * r,
        known_beta=1.0,
    ),
    "sin": NonlinearitySpec("sin", np.sin, lambda r: 1.0, known_beta=0.0),
    # exp(x^2/8) is the strongest Gaussian-square-integrable growth in the
    # battery: E[exp(x^2/4)] = sqrt(2) exactly.  (exp(x^2/4) itself already
    # fails F in L2: E[exp(x^2/2)] diverges.)
    "exp_mild": NonlinearitySpec(
        "exp_mild",
        lambda x: np.exp(x * x / 8.0),
        lambda r: (r / 4.0) * np.exp(r * r / 8.0),
        known_beta=3.0 ** -1.5,
    ),
    # smoothed |x| for time integration: C^1, globally Lipschitz with the
    # same constant 1, beta within O(delta) of beta(|x|)
    "abs_smooth": NonlinearitySpec(
        "abs_smooth", _abs_smooth(0.05), lambda r: 1.0, known_beta=None
    ),
}


def get_nonlinearity(name: str) -> NonlinearitySpec:
    try:
        return BATTERY[name]
    except KeyError:
        raise KeyError(
            f"unknown nonlinearity {name!r}; available: {sorted(BATTERY)}"
        ) from None
