"""Triangular harmonic-coefficient arrays for real isotropic fields.

Only m >= 0 is stored; negative projections are implied by the reality
constraint a_{l,-m} = (-1)^m conj(a_{lm}), which also forces a_{l0} real.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class CoefficientSet:
    """Harmonic coefficients a_{lm} for 0 <= l <= lmax, 0 <= m <= l."""

    rows: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def zeros(cls, lmax: int) -> "CoefficientSet":
        return cls([np.zeros(l + 1, dtype=np.complex128) for l in range(lmax + 1)])

    @property
    def lmax(self) -> int:
        return len(self.rows) - 1

    def coeff(self, l: int, m: int) -> complex:
        """a_{lm} for any -l <= m <= l (negative m via the reality constraint)."""
        if abs(m) > l or l > self.lmax:
            raise ValueError(f"(l={l}, m={m}) outside the stored triangle")
        if m >= 0:
            return complex(self.rows[l][m])
        val = np.conj(self.rows[l][-m])
        return complex(-val if m & 1 else val)

    def full_row(self, l: int) -> np.ndarray:
        """a_{lm} for m = -l..l as a dense vector (index m + l)."""
        row = self.rows[l]
        out = np.empty(2 * l + 1, dtype=np.complex128)
        out[l:] = row
        if l:
            signs = np.where(np.arange(1, l + 1) % 2 == 1, -1.0, 1.0)
            out[:l] = (signs * np.conj(row[1:]))[::-1]
        return out

    def validate(self, tol: float = 1e-10) -> None:
        """Check the reality constraint on the stored triangle."""
        for l, row in enumerate(self.rows):
            if row.shape != (l + 1,):
                raise ValueError(f"row {l} has wrong length {row.shape}")
            scale = max(1.0, float(np.max(np.abs(row))) if row.size else 1.0)
            if abs(float(row[0].imag)) > tol * scale:
                raise ValueError(f"a_{{l0}} must be real; row l={l} violates this")

    def copy(self) -> "CoefficientSet":
        return CoefficientSet([row.copy() for row in self.rows])
