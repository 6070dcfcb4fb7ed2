"""Equal-weight correlation matrices and their off-diagonal distributions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation, NotNormalized
from .rates import ReturnPanel

CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric m x m Pearson matrix for one base currency.

    Invariants enforced on construction: symmetry, unit diagonal, entries in
    [-1, 1], trace equal to the row count, and positive semidefiniteness.
    """

    base: str
    codes: list[str]
    values: np.ndarray
    T: int
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        m = len(self.codes)
        v = self.values
        if v.shape != (m, m):
            raise InvariantViolation(f"matrix shape {v.shape} != ({m}, {m})")
        if m == 0:
            raise InvariantViolation("empty correlation matrix")
        if np.max(np.abs(v - v.T)) > 1e-14:
            raise InvariantViolation("matrix not symmetric to 1e-14")
        if np.max(np.abs(np.diag(v) - 1.0)) > 1e-12:
            raise InvariantViolation("diagonal departs from 1 by more than 1e-12")
        if np.max(np.abs(v)) > 1.0 + 1e-12:
            raise InvariantViolation("entry outside [-1, 1] beyond tolerance")
        if abs(np.trace(v) - m) > 1e-10:
            raise InvariantViolation("trace departs from row count")
        if m > 1 and float(np.linalg.eigvalsh(v)[0]) < -1e-10:
            raise InvariantViolation("matrix not positive semidefinite")

    @property
    def m(self) -> int:
        return len(self.codes)


@dataclass(frozen=True)
class OffDiagHistogram:
    base: str
    bin_edges: np.ndarray
    density: np.ndarray
    mean: float
    mode_bin: float
    count: int

    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


def correlation_matrix(rp: ReturnPanel) -> CorrelationMatrix:
    """(1/T) R R^T of a normalized return panel; equals pairwise Pearson."""
    if not rp.normalized:
        raise NotNormalized("correlation requires normalized returns")
    m, t = rp.m, rp.T
    values = (rp.returns @ rp.returns.T) / t
    values = 0.5 * (values + values.T)
    excess = np.abs(values) - 1.0
    if np.any(excess > CLAMP_TOL):
        raise InvariantViolation(
            f"correlation entry exceeds 1 by {float(np.max(excess)):.3e}"
        )
    values = np.clip(values, -1.0, 1.0)
    np.fill_diagonal(values, 1.0)
    warnings = []
    if t < m + 1:
        warnings.append(f"RankDeficient: T={t} < m+1={m + 1}")
    return CorrelationMatrix(base=rp.base, codes=list(rp.codes), values=values, T=t, warnings=warnings)


def offdiag_histogram(cm: CorrelationMatrix, bins: int = 80) -> OffDiagHistogram:
    """Density histogram of the strictly-lower-triangle entries on [-1, 1]."""
    if bins < 10:
        raise ValueError("need at least 10 bins")
    lower = cm.values[np.tril_indices(cm.m, k=-1)]
    if lower.size == 0:
        edges = np.linspace(-1.0, 1.0, bins + 1)
        return OffDiagHistogram(cm.base, edges, np.zeros(bins), 0.0, 0.0, 0)
    density, edges = np.histogram(lower, bins=bins, range=(-1.0, 1.0), density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    mode = float(centers[int(np.argmax(density))])
    return OffDiagHistogram(
        base=cm.base,
        bin_edges=edges,
        density=density,
        mean=float(lower.mean()),
        mode_bin=mode,
        count=int(lower.size),
    )
