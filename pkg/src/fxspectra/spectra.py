"""Eigendecomposition, random-matrix bounds, and delocalization measures.

The eigensolver is a cyclic Jacobi iteration with a round-robin (tournament)
pivot ordering: every sweep visits all m(m-1)/2 off-diagonal pivots once, in
m-1 rounds of pairwise-disjoint rotations. Because the pairs within a round
are disjoint, each rotation's angle is unaffected by the others, so a whole
round can be applied as one orthogonal update -- two small matrix products --
while remaining exactly a cyclic Jacobi sweep. Matrices here are at most a
few dozen rows, where Jacobi is both fast enough and gives high relative
accuracy for the near-zero eigenvalues that strong collectivity produces.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .corrmat import CorrelationMatrix
from .errors import InvariantViolation, NoConvergence

OFF_NORM_SCALE = 1e-12  # convergence: off-diagonal Frobenius norm < scale * m
MAX_SWEEPS = 100
TIE_TOL = 1e-12


@dataclass(frozen=True)
class EigenSpectrum:
    """Ascending eigenvalues with matched orthonormal eigenvector columns."""

    base: str
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column k pairs with eigenvalues[k]
    ipr: np.ndarray
    trace_check: float

    def __post_init__(self):
        lam, vec = self.eigenvalues, self.eigenvectors
        m = lam.size
        if vec.shape != (m, m) or self.ipr.shape != (m,):
            raise InvariantViolation("spectrum shape mismatch")
        if np.any(np.diff(lam) < 0):
            raise InvariantViolation("eigenvalues not ascending")
        if lam[0] < -1e-10:
            raise InvariantViolation(f"negative eigenvalue {lam[0]:.3e}")
        if abs(float(lam.sum()) - m) > 1e-8:
            raise InvariantViolation("eigenvalue sum departs from trace")
        gram = vec.T @ vec
        if np.max(np.abs(gram - np.eye(m))) > 1e-10:
            raise InvariantViolation("eigenvectors not orthonormal to 1e-10")
        if np.any(self.ipr < 1.0 / m - 1e-12) or np.any(self.ipr > 1.0 + 1e-12):
            raise InvariantViolation("IPR outside [1/m, 1]")

    @property
    def m(self) -> int:
        return self.eigenvalues.size


@dataclass(frozen=True)
class RmtBounds:
    """Marchenko-Pastur support edges for unit-variance noise, q = T/m."""

    q: float
    lambda_minus: float
    lambda_plus: float
    count_above: int
    count_below: int


class CollectivitySummary(NamedTuple):
    lambda_max: float
    trace_fraction: float
    gap: float


@lru_cache(maxsize=None)
def _schedule(m: int) -> tuple:
    """Round-robin rounds of disjoint (p, q) pivot pairs covering all pairs.

    Circle method: seat 0 is fixed, the rest rotate; odd m gets a phantom
    seat whose pairs are dropped. Returns a tuple of (p_array, q_array)
    rounds with p < q elementwise.
    """
    seats = m if m % 2 == 0 else m + 1
    ring = list(range(1, seats))
    rounds = []
    for _ in range(seats - 1):
        order = [0] + ring
        left = order[: seats // 2]
        right = order[seats // 2 :][::-1]
        pairs = [(min(p, q), max(p, q)) for p, q in zip(left, right) if max(p, q) < m]
        if pairs:
            rounds.append(
                (
                    np.array([p for p, _ in pairs], dtype=np.intp),
                    np.array([q for _, q in pairs], dtype=np.intp),
                )
            )
        ring = ring[-1:] + ring[:-1]
    return tuple(rounds)


def jacobi_eigh(matrix: np.ndarray, base: str = "") -> tuple[np.ndarray, np.ndarray, int]:
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Returns (unsorted eigenvalue estimates, accumulated rotations, sweeps).
    Raises NoConvergence if the off-diagonal Frobenius norm has not dropped
    below OFF_NORM_SCALE * m within MAX_SWEEPS sweeps.
    """
    m = matrix.shape[0]
    a = np.array(matrix, dtype=np.float64, copy=True)
    v = np.eye(m)
    if m == 1:
        return np.diag(a).copy(), v, 0
    target = OFF_NORM_SCALE * m
    for sweep in range(MAX_SWEEPS):
        off = a - np.diag(np.diag(a))
        if np.sqrt(np.sum(off * off)) < target:
            return np.diag(a).copy(), v, sweep
        for p, q in _schedule(m):
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            with np.errstate(over="ignore"):
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(1.0 + theta * theta))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            rot = np.eye(m)
            rot[p, p] = c
            rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            a = rot.T @ a @ rot
            a[p, q] = 0.0
            a[q, p] = 0.0
            v = v @ rot
        a = 0.5 * (a + a.T)
    raise NoConvergence(
        f"Jacobi sweep cap ({MAX_SWEEPS}) hit" + (f" for base {base}" if base else "")
    )


def _order_spectrum(lam: np.ndarray, vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending order; near-degenerate runs (< TIE_TOL apart) are ordered by
    the index of each vector's largest-magnitude component, descending."""
    order = np.argsort(lam, kind="stable")
    lam, vec = lam[order], vec[:, order]
    m = lam.size
    start = 0
    while start < m:
        end = start + 1
        while end < m and lam[end] - lam[end - 1] < TIE_TOL:
            end += 1
        if end - start > 1:
            peaks = np.argmax(np.abs(vec[:, start:end]), axis=0)
            perm = np.argsort(-peaks, kind="stable")
            lam[start:end] = lam[start:end][perm]
            vec[:, start:end] = vec[:, start:end][:, perm]
        start = end
    return lam, vec


def _fix_signs(vec: np.ndarray) -> np.ndarray:
    peaks = np.argmax(np.abs(vec), axis=0)
    signs = np.sign(vec[peaks, np.arange(vec.shape[1])])
    signs[signs == 0] = 1.0
    return vec * signs


def eigendecompose(cm: CorrelationMatrix) -> EigenSpectrum:
    """Full eigensystem of a correlation matrix, ascending, sign-fixed."""
    lam, vec, _ = jacobi_eigh(cm.values, base=cm.base)
    lam, vec = _order_spectrum(lam, vec)
    vec = _fix_signs(vec)
    return EigenSpectrum(
        base=cm.base,
        eigenvalues=lam,
        eigenvectors=vec,
        ipr=np.sum(vec**4, axis=0),
        trace_check=float(lam.sum()),
    )


def ipr(spectrum: EigenSpectrum, k: int) -> float:
    """Inverse participation ratio of eigenvector k: sum of fourth powers.

    1/m for a perfectly uniform vector, 1 for a single-component one.
    """
    v = spectrum.eigenvectors[:, k]
    return float(np.sum(v**4))


def rmt_bounds(spectrum: EigenSpectrum, T: int) -> RmtBounds:
    """Count eigenvalues outside the pure-noise support (1 +- sqrt(m/T))^2."""
    if T < 2:
        raise ValueError("need T >= 2")
    m = spectrum.m
    if m < 2:
        raise ValueError("need at least 2 eigenvalues")
    ratio = np.sqrt(m / T)
    lo = (1.0 - ratio) ** 2
    hi = (1.0 + ratio) ** 2
    return RmtBounds(
        q=T / m,
        lambda_minus=float(lo),
        lambda_plus=float(hi),
        count_above=int(np.sum(spectrum.eigenvalues > hi)),
        count_below=int(np.sum(spectrum.eigenvalues < lo)),
    )


def collectivity_summary(spectrum: EigenSpectrum) -> CollectivitySummary:
    """Largest eigenvalue, its share of the trace, and its gap to the next."""
    if spectrum.m < 2:
        raise ValueError("need at least 2 eigenvalues")
    lam = spectrum.eigenvalues
    return CollectivitySummary(
        lambda_max=float(lam[-1]),
        trace_fraction=float(lam[-1] / spectrum.m),
        gap=float(lam[-1] - lam[-2]),
    )
