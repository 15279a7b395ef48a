"""Angular power spectrum models and tabulation.

The parametric family is C_l = c * l^(-alpha) * exp(-beta*l) for l >= 1
(monopole zero), covering both polynomially and exponentially damped
spectra.  Summability of (2l+1) C_l requires beta > 0, or beta = 0 with
alpha > 2; the constructor enforces this.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class PowerExpModel:
    """Power-times-exponential spectrum model, truncated at ``lmax``."""

    alpha: float
    beta: float
    c: float = 1.0
    lmax: int = 64

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("exponential rate beta must be nonnegative")
        if self.beta == 0 and not self.alpha > 2:
            raise ValueError(
                "beta = 0 requires alpha > 2, otherwise "
                "sum l^(1-alpha) e^(-beta l) diverges and the field has "
                "infinite variance"
            )
        if not self.c > 0:
            raise ValueError("amplitude c must be positive")
        if self.lmax < 1:
            raise ValueError("lmax must be at least 1")

    def value(self, l) -> np.ndarray:
        """C_l of the untruncated model law for l >= 1."""
        l = np.asarray(l, dtype=np.float64)
        return self.c * l ** (-self.alpha) * np.exp(-self.beta * l)

    def sup_tail(self, k: int) -> float:
        """sup of C_l over l >= max(k, 1).

        For alpha >= 0 the law decreases; for alpha < 0 (with beta > 0) the
        peak sits near l* = -alpha/beta and must be checked explicitly.
        """
        k = max(k, 1)
        if self.alpha >= 0:
            return float(self.value(k))
        lstar = -self.alpha / self.beta
        cands = {k, int(math.floor(lstar)), int(math.ceil(lstar))}
        return max(float(self.value(max(x, k))) for x in cands)


@dataclass
class PowerSpectrum:
    """Tabulated nonnegative spectrum C_l for l = 0..lmax."""

    values: np.ndarray
    model: PowerExpModel | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("spectrum must be a nonempty 1-d table")
        if np.any(self.values < 0):
            raise ValueError("spectrum values must be nonnegative")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("spectrum values must be finite")

    @property
    def lmax(self) -> int:
        return self.values.size - 1

    @property
    def total_variance(self) -> float:
        """Field variance sum_l (2l+1) C_l / 4pi over the tabulated range."""
        ls = np.arange(self.values.size, dtype=np.float64)
        return float(np.sum((2.0 * ls + 1.0) * self.values) / FOUR_PI)


def make_spectrum(model: PowerExpModel) -> PowerSpectrum:
    """Tabulate the model: C_0 = 0 and C_l = c l^(-alpha) e^(-beta l) for l >= 1."""
    values = np.zeros(model.lmax + 1)
    ls = np.arange(1, model.lmax + 1)
    values[1:] = model.value(ls)
    return PowerSpectrum(values=values, model=model)


def normalize_unit_variance(spec: PowerSpectrum) -> PowerSpectrum:
    """Rescale so the tabulated variance sum_l (2l+1) C_l / 4pi equals 1."""
    z = spec.total_variance
    if z <= 0:
        raise ValueError("cannot normalize a zero spectrum")
    model = replace(spec.model, c=spec.model.c / z) if spec.model else None
    return PowerSpectrum(values=spec.values / z, model=model)


def variance_tail_bound(model: PowerExpModel, lmax: int) -> float:
    """Upper bound on the discarded variance sum_{l > lmax} (2l+1) C_l / 4pi.

    beta = 0 uses the integral test (the summand decreases for alpha > 2);
    beta > 0 uses a geometric-ratio majorant, stepping forward until the
    term ratio provably stays below one.
    """
    a, b, c = model.alpha, model.beta, model.c

    def g(l: float) -> float:
        return c * (2.0 * l + 1.0) * l ** (-a) * math.exp(-b * l) / FOUR_PI

    m = lmax + 1
    if b == 0.0:
        integral = 2.0 * m ** (2.0 - a) / (a - 2.0) + m ** (1.0 - a) / (a - 1.0)
        return g(m) + c * integral / FOUR_PI
    total = 0.0
    l = m
    for _ in range(1_000_000):
        # sup over l' >= l of g(l'+1)/g(l'), each factor maximized at l' = l
        rho = (2.0 * l + 3.0) / (2.0 * l + 1.0) * math.exp(-b)
        if a < 0:
            rho *= ((l + 1.0) / l) ** (-a)
        if rho < 1.0:
            return total + g(l) / (1.0 - rho)
        total += g(l)
        l += 1
    raise RuntimeError("tail bound did not converge")


# --------------------------------------------------------------------------
# CSV interchange: header "l,C_l", one row per multipole
# --------------------------------------------------------------------------

def write_spectrum_csv(spec: PowerSpectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("l,C_l\n")
        for l, v in enumerate(spec.values):
            fh.write(f"{l},{v!r}\n")
        fh.write(f"# total_variance,{spec.total_variance!r}\n")


def read_spectrum_csv(path) -> PowerSpectrum:
    values: dict[int, float] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header[:2]] != ["l", "C_l"]:
            raise ValueError(f"unexpected spectrum header {header!r}")
        for row in reader:
            if not row or row[0].lstrip().startswith("#"):
                continue
            values[int(row[0])] = float(row[1])
    if not values:
        raise ValueError("empty spectrum file")
    lmax = max(values)
    table = np.zeros(lmax + 1)
    for l, v in values.items():
        table[l] = v
    return PowerSpectrum(values=table)
