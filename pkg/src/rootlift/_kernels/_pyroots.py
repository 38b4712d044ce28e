"""Numpy fallback for the batched fiber root solver.

Roots come from batched companion-matrix eigenvalues, then a few guarded
Newton polishing sweeps push residuals to solver tolerance.  Fibers are
returned in canonical order (lexicographic by real part, then imaginary
part), which numpy's complex sort implements directly.
"""

from __future__ import annotations

import numpy as np


def horner(coeffs: np.ndarray, z: np.ndarray):
    """Evaluate monic p and p' at z; coeffs are c_0..c_{n-1} per row."""
    m, n = coeffs.shape
    p = np.ones_like(z)
    dp = np.zeros_like(z)
    for k in range(n - 1, -1, -1):
        dp = dp * z + p
        p = p * z + coeffs[:, k, None]
    return p, dp


def polish(coeffs: np.ndarray, roots: np.ndarray, sweeps: int = 3) -> np.ndarray:
    """Guarded Newton sweeps; steps are skipped where p' underflows."""
    z = roots.copy()
    for _ in range(sweeps):
        p, dp = horner(coeffs, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = p / dp
        ok = (np.abs(dp) > 1e-300) & (np.abs(step) < 0.5 * (1.0 + np.abs(z)))
        z = np.where(ok, z - step, z)
    return z


def solve_fibers(coeffs: np.ndarray) -> np.ndarray:
    """Roots (with multiplicity) of monic fibers, one row per fiber.

    ``coeffs[s]`` holds the lower coefficients c_0..c_{n-1} of the monic
    degree-n polynomial at sample s.  The result row is sorted canonically.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=complex)
    m, n = coeffs.shape
    if n == 0:
        return np.empty((m, 0), dtype=complex)
    if n == 1:
        return -coeffs.copy()
    comp = np.zeros((m, n, n), dtype=complex)
    idx = np.arange(1, n)
    comp[:, idx, idx - 1] = 1.0
    comp[:, :, n - 1] = -coeffs
    roots = np.linalg.eigvals(comp)
    roots = polish(coeffs, roots)
    return np.sort(roots, axis=1)


def residuals(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    p, _ = horner(np.ascontiguousarray(coeffs, dtype=complex), roots)
    return np.abs(p)
