"""Wave-speed analysis of the two-layer channel system.

All functions accept scalars or equally shaped numpy arrays unless stated.
Only :func:`eigenvalue_bounds` and :func:`one_sided_speeds` feed the scheme;
the remaining functions serve diagnostics and the eigenvalue sweep.
"""

from dataclasses import dataclass
from typing import Tuple
import logging

import numpy as np

from src.config.constants import HYPERBOLIC_IMAG_TOL, LOGGER_NAME
from src.config.settings import PhysicalParams
from src.types import ArrayLike, FloatArray, NegativeSoundSpeedError, SolverError

logger: logging.Logger = logging.getLogger(f"{LOGGER_NAME}.eigen")

Bounds = Tuple[ArrayLike, ArrayLike, ArrayLike, ArrayLike]


@dataclass(frozen=True)
class LocalSpeeds:
    """One-sided speeds and the extremal eigenvalue bounds at each interface."""

    a_plus: FloatArray
    a_minus: FloatArray
    gamma1_plus: FloatArray
    gamma1_minus: FloatArray
    gamma2_plus: FloatArray
    gamma2_minus: FloatArray

    @property
    def max_speed(self) -> float:
        if self.a_plus.size == 0:
            return 0.0
        return float(np.max(np.maximum(self.a_plus, -self.a_minus)))


def _sqrt_checked(radicand: ArrayLike, what: str) -> ArrayLike:
    value = np.asarray(radicand, dtype=np.float64)
    if np.any(value < 0.0):
        raise NegativeSoundSpeedError(f"negative radicand in {what}: {float(np.min(value))}")
    root = np.sqrt(value)
    return float(root) if root.ndim == 0 else root


def sound_speeds(
    a1: ArrayLike,
    a2: ArrayLike,
    sigma1: ArrayLike,
    sigma2: ArrayLike,
    params: PhysicalParams,
) -> Tuple[ArrayLike, ArrayLike]:
    """c2 = sqrt(g A2/sigma2), c1 = sqrt(g (r A1/sigma2 + eps A1/sigma1))."""
    g, r, eps = params.g, params.r, params.eps
    c2 = _sqrt_checked(g * np.asarray(a2) / sigma2, "c2")
    c1 = _sqrt_checked(g * (r * np.asarray(a1) / sigma2 + eps * np.asarray(a1) / sigma1), "c1")
    return c1, c2


def char_poly_coefficients(
    u1: float, u2: float, c1: float, c2: float, a1: float, sigma2: float, params: PhysicalParams
) -> FloatArray:
    """Monic quartic coefficients, highest degree first."""
    first = np.array([1.0, -2.0 * u1, u1 * u1 - c1 * c1])
    second = np.array([1.0, -2.0 * u2, u2 * u2 - c2 * c2])
    coeffs = np.polymul(first, second)
    coeffs[-1] -= params.r * params.g * a1 / sigma2 * c2 * c2
    return coeffs


def char_poly(
    lam: ArrayLike,
    u1: ArrayLike,
    u2: ArrayLike,
    c1: ArrayLike,
    c2: ArrayLike,
    a1: ArrayLike,
    sigma2: ArrayLike,
    params: PhysicalParams,
) -> ArrayLike:
    """p(lam) = [(lam-u1)^2 - c1^2][(lam-u2)^2 - c2^2] - r (g A1/sigma2) c2^2."""
    coupling = params.r * params.g * np.asarray(a1) / sigma2 * np.asarray(c2) ** 2
    value = ((lam - u1) ** 2 - c1**2) * ((lam - u2) ** 2 - c2**2) - coupling
    return float(value) if np.ndim(value) == 0 else value


def coefficient_matrix(
    u1: float, u2: float, c1: float, c2: float, a1: float, sigma2: float, params: PhysicalParams
) -> FloatArray:
    """Matrix of the quasilinear form W_t + M W_x = S for W = (A1, Q1, A2, Q2)."""
    return np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [c1 * c1 - u1 * u1, 2.0 * u1, params.r * params.g * a1 / sigma2, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [c2 * c2, 0.0, c2 * c2 - u2 * u2, 2.0 * u2],
        ]
    )


def eigenvalues_numeric(
    u1: float, u2: float, c1: float, c2: float, a1: float, sigma2: float, params: PhysicalParams
) -> np.ndarray:
    """The four roots of the characteristic polynomial, sorted by real part.

    Computed as eigenvalues of the companion matrix of the monic quartic.
    """
    coeffs = char_poly_coefficients(u1, u2, c1, c2, a1, sigma2, params)
    companion = np.zeros((4, 4))
    companion[0, :] = -coeffs[1:]
    companion[1:, :-1] = np.eye(3)
    try:
        roots = np.linalg.eigvals(companion)
    except np.linalg.LinAlgError as e:
        raise SolverError(f"eigenvalue solver failed: {e}") from e
    if not np.all(np.isfinite(roots)):
        raise SolverError("eigenvalue solver returned non-finite roots")
    return roots[np.lexsort((roots.imag, roots.real))].astype(np.complex128)


def internal_eig_approx(
    u1: ArrayLike,
    u2: ArrayLike,
    c1: ArrayLike,
    c2: ArrayLike,
    a1: ArrayLike,
    sigma1: ArrayLike,
    params: PhysicalParams,
) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """Small-eps approximation of the two internal eigenvalues.

    Returns ``(lam_minus, lam_plus, valid)``; ``valid`` is false where the
    radicand is negative, in which case both values collapse to ``u_hat``.
    """
    c1s = np.asarray(c1, dtype=np.float64) ** 2
    c2s = np.asarray(c2, dtype=np.float64) ** 2
    total = c1s + c2s
    q = params.g * np.asarray(a1, dtype=np.float64) / sigma1
    shear = (np.asarray(u2) - np.asarray(u1)) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        u_hat = np.where(total > 0.0, (c2s * u1 + c1s * u2) / np.where(total > 0, total, 1.0), u1)
        radicand = np.where(
            total > 0.0,
            c2s * (params.eps * q * total - c1s * shear) / np.where(total > 0, total, 1.0) ** 2,
            0.0,
        )
    valid = radicand >= 0.0
    half_width = np.sqrt(np.maximum(radicand, 0.0))
    lam_minus, lam_plus = u_hat - half_width, u_hat + half_width
    if np.ndim(lam_minus) == 0:
        return float(lam_minus), float(lam_plus), bool(valid)
    return lam_minus, lam_plus, valid


def external_eig_approx(
    u1: ArrayLike,
    u2: ArrayLike,
    a1: ArrayLike,
    a2: ArrayLike,
    sigma1: ArrayLike,
    sigma2: ArrayLike,
    params: PhysicalParams,
) -> Tuple[ArrayLike, ArrayLike]:
    """Barotropic eigenvalues with their first-order correction in eps."""
    g, eps = params.g, params.eps
    total = np.asarray(a1, dtype=np.float64) + a2
    if np.any(total <= 0.0):
        raise ValueError("external eigenvalues need A1 + A2 > 0")
    u_bar = (np.asarray(a1) * u1 + np.asarray(a2) * u2) / total
    c_bar = np.sqrt(g * total / sigma2)
    internal = g * np.asarray(a1) / sigma2
    correction = 0.5 * eps * internal / c_bar * (1.0 - (g * np.asarray(a1) / sigma1) / (g * total / sigma2))
    lam_minus = u_bar - c_bar + correction
    lam_plus = u_bar + c_bar - correction
    if np.ndim(lam_minus) == 0:
        return float(lam_minus), float(lam_plus)
    return lam_minus, lam_plus


def composite_froude(
    u1: ArrayLike,
    u2: ArrayLike,
    c1: ArrayLike,
    c2: ArrayLike,
    a1: ArrayLike,
    sigma1: ArrayLike,
    params: PhysicalParams,
) -> ArrayLike:
    """Squared composite Froude number G^2; zero without an internal layer or stratification."""
    eps = params.eps
    a1_arr = np.asarray(a1, dtype=np.float64)
    c2s = np.asarray(c2, dtype=np.float64) ** 2
    q = params.g * a1_arr / sigma1
    active = (a1_arr > 0.0) & (c2s > 0.0) & (eps > 0.0)
    safe_q = np.where(active, q, 1.0)
    safe_c2s = np.where(active, c2s, 1.0)
    f1 = np.asarray(u1) ** 2 / (eps * safe_q) if eps > 0.0 else np.zeros_like(safe_q)
    f2 = np.asarray(u2) ** 2 / (eps * safe_c2s) if eps > 0.0 else np.zeros_like(safe_q)
    g2 = f1 + np.asarray(c1) ** 2 / safe_q * f2 - eps * f1 * f2
    g2 = np.where(active, g2, 0.0)
    return float(g2) if g2.ndim == 0 else g2


def hyperbolicity_ok(
    u1: ArrayLike,
    u2: ArrayLike,
    c1: ArrayLike,
    c2: ArrayLike,
    a1: ArrayLike,
    sigma1: ArrayLike,
    params: PhysicalParams,
) -> ArrayLike:
    """Approximate criterion (u2-u1)^2 <= (g A1/sigma1)/c1^2 * eps (c1^2 + c2^2).

    Evaluated multiplied through by c1^2, so a vanishing internal layer counts
    as hyperbolic.
    """
    c1s = np.asarray(c1, dtype=np.float64) ** 2
    c2s = np.asarray(c2, dtype=np.float64) ** 2
    q = params.g * np.asarray(a1, dtype=np.float64) / sigma1
    shear = (np.asarray(u2) - np.asarray(u1)) ** 2
    ok = c1s * shear <= q * params.eps * (c1s + c2s)
    return bool(ok) if np.ndim(ok) == 0 else ok


def hyperbolicity_exact(
    u1: float, u2: float, c1: float, c2: float, a1: float, sigma2: float, params: PhysicalParams
) -> bool:
    """True when every numeric root is real to within the imaginary tolerance."""
    roots = eigenvalues_numeric(u1, u2, c1, c2, a1, sigma2, params)
    return bool(np.all(np.abs(roots.imag) <= HYPERBOLIC_IMAG_TOL * (1.0 + np.abs(roots))))


def eigenvalue_bounds(
    u1: ArrayLike,
    u2: ArrayLike,
    c2: ArrayLike,
    a1: ArrayLike,
    sigma1: ArrayLike,
    sigma2: ArrayLike,
    params: PhysicalParams,
) -> Bounds:
    """Real bounds (gamma1-, gamma1+, gamma2-, gamma2+) enclosing the spectrum."""
    g, eps = params.g, params.eps
    sr = np.sqrt(params.r)
    a1_arr = np.asarray(a1, dtype=np.float64)
    spread1 = np.sqrt(sr * (1.0 + sr) * g * a1_arr / sigma2 + eps * g * a1_arr / sigma1)
    spread2 = np.sqrt(1.0 + sr) * np.asarray(c2, dtype=np.float64)
    bounds = (u1 - spread1, u1 + spread1, u2 - spread2, u2 + spread2)
    if all(np.ndim(b) == 0 for b in bounds):
        return tuple(float(b) for b in bounds)  # type: ignore[return-value]
    return bounds


def one_sided_speeds(left_bounds: Bounds, right_bounds: Bounds) -> LocalSpeeds:
    """a+ = max(gamma+, 0) and a- = min(gamma-, 0) over both sides of each interface."""
    g1m = np.minimum(left_bounds[0], right_bounds[0])
    g1p = np.maximum(left_bounds[1], right_bounds[1])
    g2m = np.minimum(left_bounds[2], right_bounds[2])
    g2p = np.maximum(left_bounds[3], right_bounds[3])
    a_plus = np.maximum(np.maximum(g1p, g2p), 0.0)
    a_minus = np.minimum(np.minimum(g1m, g2m), 0.0)
    return LocalSpeeds(
        a_plus=np.atleast_1d(a_plus),
        a_minus=np.atleast_1d(a_minus),
        gamma1_plus=np.atleast_1d(g1p),
        gamma1_minus=np.atleast_1d(g1m),
        gamma2_plus=np.atleast_1d(g2p),
        gamma2_minus=np.atleast_1d(g2m),
    )


def figure_state(delta: float, r: float) -> Tuple[float, float, float, float, float, float]:
    """Reference sweep state (u1, u2, a1, a2, sigma1, sigma2) with u2 = u1 + delta * c_bar."""
    a1, a2, u1, sigma1, sigma2 = 1.5, 2.0, 1.0, 1.4, 2.0
    c_bar = float(np.sqrt(PhysicalParams(r=r).g * (a1 + a2) / sigma2))
    return u1, u1 + delta * c_bar, a1, a2, sigma1, sigma2


def sweep_row(eps: float) -> FloatArray:
    """One row of the eigenvalue sweep at eps = delta."""
    params = PhysicalParams(r=1.0 - eps)
    u1, u2, a1, a2, sigma1, sigma2 = figure_state(eps, params.r)
    c1, c2 = sound_speeds(a1, a2, sigma1, sigma2, params)
    roots = eigenvalues_numeric(u1, u2, c1, c2, a1, sigma2, params)
    ext_m, ext_p = external_eig_approx(u1, u2, a1, a2, sigma1, sigma2, params)
    int_m, int_p, _ = internal_eig_approx(u1, u2, c1, c2, a1, sigma1, params)
    bounds = eigenvalue_bounds(u1, u2, c2, a1, sigma1, sigma2, params)
    return np.array(
        [eps, *roots.real, float(np.max(np.abs(roots.imag))),
         ext_m, int_m, int_p, ext_p, *bounds],
        dtype=np.float64,
    )
