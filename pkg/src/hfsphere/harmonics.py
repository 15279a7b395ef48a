"""Complex spherical harmonics Y_lm via fully normalized associated-Legendre
recurrences (Condon-Shortley phase, orthonormal on the sphere)."""

from __future__ import annotations

import math

import numpy as np

from .coefficients import CoefficientSet

FOUR_PI = 4.0 * math.pi


def _check_angles(theta, phi):
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    if np.any(theta < -1e-12) or np.any(theta > math.pi + 1e-12):
        raise ValueError("colatitude must lie in [0, pi]")
    return theta, phi


def _legendre_norm_column(l: int, m: int, ct: np.ndarray, st: np.ndarray) -> np.ndarray:
    """Normalized Legendre lambda_lm(theta) with Y_lm = lambda_lm * e^{i m phi}.

    Normalization is folded into the recurrence; raw P_l^m would overflow
    near l ~ 150.
    """
    # walk the diagonal to (m, m), then raise the degree at fixed order
    p_mm = np.full_like(ct, 1.0 / math.sqrt(FOUR_PI))
    for k in range(1, m + 1):
        p_mm = -math.sqrt((2.0 * k + 1.0) / (2.0 * k)) * st * p_mm
    if l == m:
        return p_mm
    p_prev = p_mm
    p_cur = math.sqrt(2.0 * m + 3.0) * ct * p_mm
    for k in range(m + 2, l + 1):
        a = math.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
        b = math.sqrt(((k - 1.0) ** 2 - m * m) / (4.0 * (k - 1.0) ** 2 - 1.0))
        p_cur, p_prev = a * (ct * p_cur - b * p_prev), p_cur
    return p_cur


def sph_harm(l: int, m: int, theta, phi):
    """Y_lm(theta, phi) under the orthonormal convention.

    Satisfies Y_{l,-m} = (-1)^m conj(Y_lm); raises for |m| > l.
    Accepts scalars or arrays (broadcast together).
    """
    if abs(m) > l:
        raise ValueError(f"projection |m|={abs(m)} exceeds degree l={l}")
    theta, phi = _check_angles(theta, phi)
    ct, st = np.cos(theta), np.sin(theta)
    lam = _legendre_norm_column(l, abs(m), ct, st)
    val = lam * np.exp(1j * abs(m) * phi)
    if m < 0:
        sign = -1.0 if m & 1 else 1.0
        val = sign * np.conj(val)
    if val.ndim == 0:
        return complex(val)
    return val


def sph_harm_row(l: int, theta, phi) -> np.ndarray:
    """Y_lm for m = 0..l, stacked on the leading axis."""
    theta, phi = _check_angles(theta, phi)
    ct, st = np.cos(theta), np.sin(theta)
    out = np.empty((l + 1,) + theta.shape, dtype=np.complex128)
    for m in range(l + 1):
        lam = _legendre_norm_column(l, m, ct, st)
        out[m] = lam * np.exp(1j * m * phi)
    return out


def synthesize_component(coeffs: CoefficientSet, l: int, theta, phi) -> np.ndarray:
    """Frequency component T_l(x) = sum_m a_lm Y_lm(x) at the given points.

    The full sum over m = -l..l of a real field is real up to rounding; the
    imaginary residue is checked against 1e-10 (it is nonzero only when the
    coefficient reality constraint is violated) and then discarded.
    """
    if l > coeffs.lmax:
        raise ValueError(f"component l={l} exceeds coefficient lmax={coeffs.lmax}")
    coeffs.validate()
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    phi = np.atleast_1d(np.asarray(phi, dtype=np.float64))
    row = coeffs.rows[l]
    ys = sph_harm_row(l, theta, phi)
    total = row[0] * ys[0]
    for m in range(1, l + 1):
        z = row[m] * ys[m]
        # a_{l,-m} Y_{l,-m} = conj(a_lm Y_lm) for coefficients of a real field
        total = total + z + np.conj(z)
    scale = max(1.0, float(np.max(np.abs(total))))
    resid = float(np.max(np.abs(total.imag)))
    if resid > 1e-10 * scale:
        raise ValueError("component is not real: malformed coefficients")
    return np.real(total)
