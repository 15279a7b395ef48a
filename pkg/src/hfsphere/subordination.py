"""Hermite subordination of Gaussian spherical fields.

Covers the probabilists' Hermite polynomials, the power spectrum of H_q(T)
for q = 2 and 3 (closed double sum and the general coupling-chain
expansion), and harmonic coefficients of the squared field H_2(T).

Conventions: the base monopole is excluded from the quadratic coupling
(the squared-field expansion runs over l1, l2 >= 1), and the output
monopole carries the centering term of H_2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import wigner
from .coefficients import CoefficientSet
from .spectrum import PowerSpectrum, variance_tail_bound

FOUR_PI = 4.0 * math.pi


def hermite(q: int, x):
    """Probabilists' Hermite polynomial H_q(x) by the three-term recurrence
    H_{k+1}(x) = x H_k(x) - k H_{k-1}(x)."""
    if q < 0:
        raise ValueError("order must be nonnegative")
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.ones_like(x)
    if q == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h_cur = x.copy()
    for k in range(1, q):
        h_cur, h_prev = x * h_cur - k * h_prev, h_cur
    return h_cur if h_cur.ndim else float(h_cur)


# --------------------------------------------------------------------------
# power spectrum of the squared field: closed double sum
# --------------------------------------------------------------------------

def quadratic_spectrum_value(base: PowerSpectrum, l: int) -> tuple[float, float]:
    """C_{l;2} of H_2(T) for a base spectrum truncated at its lmax.

    Returns ``(value, tail_bound)``:

        C_{l;2} = 2 sum_{l1,l2>=1} C_{l1} C_{l2} 3j(l1,l2,l;0,0,0)^2
                  (2l1+1)(2l2+1) / 4pi,

    restricted to triangle-admissible even-parity pairs.  The tail bound
    covers base multipoles beyond lmax when the base carries a model, and
    is zero for explicit tables (the table is then the exact model).
    """
    if l < 0:
        raise ValueError("output multipole must be nonnegative")
    c = base.values
    lmax = base.lmax
    total = 0.0
    for l1 in range(1, lmax + 1):
        line = wigner.zero_m_line(l1, l)
        jmin = abs(l1 - l)
        lo, hi = max(jmin, 1), min(l1 + l, lmax)
        if lo > hi:
            continue
        seg = line[lo - jmin: hi - jmin + 1]
        l2s = np.arange(lo, hi + 1, dtype=np.float64)
        inner = float(np.dot((2.0 * l2s + 1.0) * c[lo: hi + 1], seg * seg))
        total += c[l1] * (2.0 * l1 + 1.0) * inner
    value = 2.0 * total / FOUR_PI
    tail = 0.0
    if base.model is not None:
        tail = 4.0 * base.model.sup_tail(lmax + 1 - l) * variance_tail_bound(base.model, lmax)
    return value, tail


@dataclass
class SubordinatedSpectrum:
    """Spectrum C_{l;q} of a Hermite-subordinated field with per-entry
    truncation certificates."""

    base: PowerSpectrum
    q: int
    values: np.ndarray
    tail_bounds: np.ndarray

    @property
    def lmax(self) -> int:
        return self.values.size - 1

    @property
    def total_variance(self) -> float:
        ls = np.arange(self.values.size, dtype=np.float64)
        return float(np.sum((2.0 * ls + 1.0) * self.values) / FOUR_PI)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("l,C_l_q,tail_bound\n")
            for l in range(self.values.size):
                fh.write(f"{l},{self.values[l]!r},{self.tail_bounds[l]!r}\n")


def quadratic_spectrum(base: PowerSpectrum, lmax_out: int | None = None) -> SubordinatedSpectrum:
    """Tabulate C_{l;2} for l = 0..lmax_out (default: 2*lmax of the base,
    the largest multipole the quadratic coupling can populate)."""
    if lmax_out is None:
        lmax_out = 2 * base.lmax
    vals = np.empty(lmax_out + 1)
    tails = np.empty(lmax_out + 1)
    for l in range(lmax_out + 1):
        vals[l], tails[l] = quadratic_spectrum_value(base, l)
    return SubordinatedSpectrum(base=base, q=2, values=vals, tail_bounds=tails)


def conv_spectrum_value(base: PowerSpectrum, l: int, q: int) -> float:
    """C_{l;q} through the Clebsch-Gordan coupling-chain expansion

        C_{l;q} = q! sum_{l1..lq} prod C_{li} * (4pi/(2l+1))
                  * prod[(2li+1)/4pi] * sum_{chains} conv^2 .

    Only q in {2, 3} is supported; for q = 2 this reduces to the closed
    double sum of ``quadratic_spectrum_value`` (checked in the tests rather
    than assumed).
    """
    if q not in (2, 3):
        raise ValueError("only quadratic and cubic subordination are supported")
    c = base.values
    lmax = base.lmax
    if q == 2:
        total = 0.0
        for l1 in range(1, lmax + 1):
            for l2 in range(max(1, abs(l - l1)), min(lmax, l + l1) + 1):
                if (l1 + l2 + l) & 1:
                    continue
                conv = wigner.cg_convolution(
                    wigner.CgConvolutionPath((l1, l2), (), l))
                total += c[l1] * c[l2] * (2 * l1 + 1) * (2 * l2 + 1) * conv * conv
        return 2.0 * total / ((2.0 * l + 1.0) * FOUR_PI)
    total = 0.0
    for l1 in range(1, lmax + 1):
        for l2 in range(1, lmax + 1):
            for l3 in range(1, lmax + 1):
                chain = 0.0
                lo = max(abs(l1 - l2), abs(l - l3))
                hi = min(l1 + l2, l + l3)
                for mid in range(lo, hi + 1):
                    conv = wigner.cg_convolution(
                        wigner.CgConvolutionPath((l1, l2, l3), (mid,), l))
                    chain += conv * conv
                if chain:
                    total += (c[l1] * c[l2] * c[l3]
                              * (2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1) * chain)
    return 6.0 * total / ((2.0 * l + 1.0) * FOUR_PI * FOUR_PI)


# --------------------------------------------------------------------------
# harmonic coefficients of the squared field
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _PlanEntry:
    l1: int
    l2: int
    weight: np.ndarray  # (l+1, 2*l1+1): coupling kernel incl. pair multiplicity
    idx: np.ndarray     # (l+1, 2*l1+1): index of m2 = m - m1 into the l2 full row


_PLANS: dict[tuple[int, int], list[_PlanEntry]] = {}


def _pair_iter(l: int, lmax_in: int):
    for l1 in range(1, lmax_in + 1):
        for l2 in range(l1, lmax_in + 1):
            if not wigner.triangle_ok(l1, l2, l) or (l1 + l2 + l) & 1:
                continue
            yield l1, l2


def _build_plans(ls, lmax_in: int) -> None:
    todo = [l for l in ls if (l, lmax_in) not in _PLANS]
    if not todo:
        return
    # one Clebsch-Gordan sweep per (l1, l2) pair covers every requested l
    for l1 in range(1, lmax_in + 1):
        for l2 in range(l1, lmax_in + 1):
            needed = [l for l in todo
                      if wigner.triangle_ok(l1, l2, l) and not (l1 + l2 + l) & 1]
            if needed:
                wigner.cg_pair_matrices(l1, l2, needed)
    for l in todo:
        entries = []
        ms = np.arange(l + 1)
        for l1, l2 in _pair_iter(l, lmax_in):
            g = wigner.gaunt_zero(l1, l2, l)
            if g == 0.0:
                continue
            cg = wigner.cg_matrix(l1, l2, l)[: l + 1]  # rows M = 0..l
            # 3j(l1,l2,l; m1, m-m1, -m) = (-1)^(l1-l2+m) C^{l,m} / sqrt(2l+1)
            sign = np.where(ms % 2 == 1, -1.0, 1.0) * (-1.0 if (l1 - l2) & 1 else 1.0)
            w = g * sign[:, None] * cg / math.sqrt(2.0 * l + 1.0)
            mult = 1.0 if l1 == l2 else 2.0
            m1s = np.arange(-l1, l1 + 1)
            m2 = ms[:, None] - m1s[None, :]
            idx = np.clip(m2 + l2, 0, 2 * l2)  # out-of-range entries carry zero weight
            entries.append(_PlanEntry(l1, l2, mult * w, idx.astype(np.intp)))
        _PLANS[(l, lmax_in)] = entries


def quadratic_rows(coeffs: CoefficientSet, ls) -> dict[int, np.ndarray]:
    """Rows a_{lm;2} (m = 0..l) of H_2 applied to the field of ``coeffs``.

    The sum over (l1, m1, l2, m2 = m - m1) is organized per coupling pair
    with precomputed kernel tables, so each replicate costs a handful of
    dense products per pair.
    """
    lmax_in = coeffs.lmax
    ls = sorted(set(int(l) for l in ls))
    if any(l < 1 for l in ls):
        raise ValueError("quadratic rows are defined for l >= 1")
    if any(l > 2 * lmax_in for l in ls):
        raise ValueError("requested multipole beyond 2*lmax of the input")
    _build_plans(ls, lmax_in)
    full = [coeffs.full_row(l1) for l1 in range(lmax_in + 1)]
    out: dict[int, np.ndarray] = {}
    for l in ls:
        row = np.zeros(l + 1, dtype=np.complex128)
        for e in _PLANS[(l, lmax_in)]:
            a1 = full[e.l1]
            a2 = full[e.l2][e.idx]
            row += (e.weight * a2) @ a1
        out[l] = row
    return out


def subordinate_coeffs_q2(coeffs: CoefficientSet, lmax_out: int | None = None) -> CoefficientSet:
    """Harmonic coefficients of H_2(T) up to ``lmax_out`` (default 2*lmax).

    The output monopole is (1/sqrt(4pi)) sum_{l>=1,m} |a_lm|^2 - sqrt(4pi),
    which centers the squared field exactly when the input has unit
    variance; the input monopole is ignored by the quadratic coupling.
    """
    coeffs.validate()
    lmax_in = coeffs.lmax
    if lmax_out is None:
        lmax_out = 2 * lmax_in
    if lmax_out > 2 * lmax_in:
        raise ValueError("lmax_out cannot exceed twice the input lmax")
    out = CoefficientSet.zeros(lmax_out)
    power = 0.0
    for l in range(1, lmax_in + 1):
        row = coeffs.rows[l]
        power += float(np.abs(row[0]) ** 2 + 2.0 * np.sum(np.abs(row[1:]) ** 2))
    out.rows[0][0] = power / math.sqrt(FOUR_PI) - math.sqrt(FOUR_PI)
    rows = quadratic_rows(coeffs, range(1, lmax_out + 1))
    for l, row in rows.items():
        scale = max(1.0, float(np.max(np.abs(row))))
        if abs(float(row[0].imag)) > 1e-10 * scale:
            raise ValueError("quadratic coupling produced a complex a_{l0}")
        row = row.copy()
        row[0] = row[0].real
        out.rows[l] = row
    return out
