"""Independent brute-force oracles used to pin expected values in the tests.

Everything here is deliberately written against the textbook definitions and
shares no code with the package: 3j symbols via the plain Fraction-based
Racah sum, 6j symbols via the quadruple projection sum over four 3j symbols,
spherical integrals via Gauss-Legendre x uniform quadrature, and fourth-order
moments via direct monomial expectations of Gaussian products.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np


# ---------------------------------------------------------------------------
# exact 3j via the Racah formula with Fraction arithmetic (value = sign*sqrt(r))
# ---------------------------------------------------------------------------

def _tri_ok(a, b, c):
    return abs(a - b) <= c <= a + b


@lru_cache(maxsize=None)
def threej_oracle(l1, l2, l3, m1, m2, m3) -> float:
    """Plain Racah-sum 3j symbol; exact rationals, one float at the end."""
    if m1 + m2 + m3 != 0 or not _tri_ok(l1, l2, l3):
        return 0.0
    if abs(m1) > l1 or abs(m2) > l2 or abs(m3) > l3:
        return 0.0
    f = math.factorial
    pref = Fraction(
        f(l1 + l2 - l3) * f(l1 - l2 + l3) * f(-l1 + l2 + l3)
        * f(l1 + m1) * f(l1 - m1) * f(l2 + m2) * f(l2 - m2)
        * f(l3 + m3) * f(l3 - m3),
        f(l1 + l2 + l3 + 1),
    )
    kmin = max(0, l2 - l3 - m1, l1 - l3 + m2)
    kmax = min(l1 + l2 - l3, l1 - m1, l2 + m2)
    ssum = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (f(k) * f(l1 + l2 - l3 - k) * f(l1 - m1 - k) * f(l2 + m2 - k)
               * f(l3 - l2 + m1 + k) * f(l3 - l1 - m2 + k))
        ssum += Fraction((-1) ** k, den)
    sign = (-1) ** (l1 - l2 - m3)
    value_sq = pref * ssum * ssum
    mag = math.sqrt(float(value_sq))
    return sign * math.copysign(mag, float(ssum)) if ssum else 0.0


def cg_oracle(l1, m1, l2, m2, L, M) -> float:
    if M != m1 + m2:
        return 0.0
    return ((-1) ** (l1 - l2 + M)) * math.sqrt(2 * L + 1) \
        * threej_oracle(l1, l2, L, m1, m2, -M)


# ---------------------------------------------------------------------------
# 6j via the quadruple projection sum over four 3j symbols
# ---------------------------------------------------------------------------

def sixj_oracle(a, b, e, c, d, f) -> float:
    """{a b e; c d f} as the projection sum

    sum over alpha,beta,gamma,delta,eps,phi of (-1)^(e+f+eps+phi)
      (a b e; alpha beta eps) (c d e; gamma delta -eps)
      (a d f; alpha delta -phi) (c b f; gamma beta phi)
    """
    total = 0.0
    for alpha in range(-a, a + 1):
        for beta in range(-b, b + 1):
            eps = -(alpha + beta)
            if abs(eps) > e:
                continue
            for gamma in range(-c, c + 1):
                delta = eps - gamma
                if abs(delta) > d:
                    continue
                phi = alpha + delta
                if abs(phi) > f:
                    continue
                t = (threej_oracle(a, b, e, alpha, beta, eps)
                     * threej_oracle(c, d, e, gamma, delta, -eps)
                     * threej_oracle(a, d, f, alpha, delta, -phi)
                     * threej_oracle(c, b, f, gamma, beta, phi))
                if t:
                    total += ((-1) ** (e + f + eps + phi)) * t
    return total


# ---------------------------------------------------------------------------
# nested Clebsch-Gordan convolution by literal summation
# ---------------------------------------------------------------------------

def cg_convolution_oracle(leaves, intermediates, terminal) -> float:
    """Three-leaf coupling chain summed literally over the intermediate
    projection; two-leaf chains are a single coefficient."""
    if len(leaves) == 2:
        return cg_oracle(leaves[0], 0, leaves[1], 0, terminal, 0)
    l1, l2, l3 = leaves
    (L1,) = intermediates
    return sum(
        cg_oracle(l1, 0, l2, 0, L1, mu) * cg_oracle(L1, mu, l3, 0, terminal, 0)
        for mu in range(-L1, L1 + 1)
    )


# ---------------------------------------------------------------------------
# quadrature on the sphere: Gauss-Legendre in cos(theta) x uniform in phi
# ---------------------------------------------------------------------------

def sphere_grid(n_theta: int, n_phi: int):
    """Nodes and weights integrating functions on S^2 exactly for band-limited
    integrands (polynomial degree < 2*n_theta in cos(theta), harmonics < n_phi
    in phi)."""
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    wphi = 2.0 * np.pi / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ww = np.broadcast_to((wx * wphi)[:, None], tt.shape)
    return tt.ravel(), pp.ravel(), ww.ravel().copy()


def sphere_integral(values: np.ndarray, weights: np.ndarray) -> complex:
    return complex(np.sum(values * weights))


# ---------------------------------------------------------------------------
# reference spherical harmonics, closed forms for l <= 3
# ---------------------------------------------------------------------------

def ylm_closed(l, m, theta, phi):
    """Closed-form Y_lm for l <= 3 (orthonormal, Condon-Shortley)."""
    st, ct = np.sin(theta), np.cos(theta)
    e = np.exp(1j * abs(m) * phi)
    pi = np.pi
    table = {
        (0, 0): 0.5 * np.sqrt(1 / pi) * np.ones_like(st),
        (1, 0): 0.5 * np.sqrt(3 / pi) * ct,
        (1, 1): -0.5 * np.sqrt(3 / (2 * pi)) * st * e,
        (2, 0): 0.25 * np.sqrt(5 / pi) * (3 * ct ** 2 - 1),
        (2, 1): -0.5 * np.sqrt(15 / (2 * pi)) * st * ct * e,
        (2, 2): 0.25 * np.sqrt(15 / (2 * pi)) * st ** 2 * e,
        (3, 0): 0.25 * np.sqrt(7 / pi) * (5 * ct ** 3 - 3 * ct),
        (3, 1): -0.125 * np.sqrt(21 / pi) * st * (5 * ct ** 2 - 1) * e,
        (3, 2): 0.25 * np.sqrt(105 / (2 * pi)) * st ** 2 * ct * e,
        (3, 3): -0.125 * np.sqrt(35 / pi) * st ** 3 * e,
    }
    val = table[(l, abs(m))]
    if m < 0:
        val = (-1) ** (abs(m)) * np.conj(val)
    return val


# ---------------------------------------------------------------------------
# expectations of polynomials in iid standard normals (for the quadratic
# cumulant oracle): E[prod z_i^{p_i}] = prod (p_i - 1)!!
# ---------------------------------------------------------------------------

def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def gaussian_monomial_moment(powers) -> float:
    out = 1.0
    for p in powers:
        if p % 2:
            return 0.0
        out *= _double_factorial(p - 1)
    return out


class QuadraticFormMoments:
    """Exact moments of products of (complex) quadratic forms in iid normals.

    Each form is a matrix Q acting as z^T Q z for the real Gaussian vector z.
    Products of up to four forms are expanded monomially; expectations follow
    from independence and the normal moment table.
    """

    def __init__(self, dim: int):
        self.dim = dim

    def expect_product(self, mats) -> complex:
        dim = self.dim
        mats = [np.asarray(Q) for Q in mats]
        total = 0.0 + 0.0j
        idx = [(i, j) for i in range(dim) for j in range(dim)]

        def rec(k, coef, powers):
            nonlocal total
            if k == len(mats):
                total += coef * gaussian_monomial_moment(powers)
                return
            Q = mats[k]
            for (i, j) in idx:
                q = Q[i, j]
                if q == 0:
                    continue
                powers2 = list(powers)
                powers2[i] += 1
                powers2[j] += 1
                rec(k + 1, coef * q, powers2)

        rec(0, 1.0 + 0.0j, [0] * dim)
        return total
