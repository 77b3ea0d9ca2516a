"""Small dense symmetric linear-algebra kernel shared by the other modules."""

import numpy as np

__all__ = [
    "check_symmetric",
    "sym_eig_smallest",
    "sym_eig_largest",
    "posneg_split",
    "spd_pinverse",
]

# Relative asymmetry allowed before an input is rejected outright; anything
# below this is absorbed by symmetrizing (M + M.T) / 2.
_ASYM_RTOL = 1e-8


def check_symmetric(M, name="matrix"):
    """Validate (approximate) symmetry and return the symmetrized matrix."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    asym = float(np.abs(M - M.T).max(initial=0.0))
    if asym > _ASYM_RTOL * scale:
        raise ValueError(f"{name} is not symmetric (max asymmetry {asym:g})")
    return 0.5 * (M + M.T)


def _fix_column_signs(B):
    """Make the first nonzero component of each column positive, in place."""
    for j in range(B.shape[1]):
        col = B[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12 * max(1.0, np.abs(col).max()))
        if nz.size and col[nz[0]] < 0:
            B[:, j] = -col
    return B


def sym_eig_smallest(M, r):
    """Orthonormal eigenvectors of the r algebraically smallest eigenvalues.

    Parameters
    ----------
    M : (p, p) symmetric array.
    r : number of eigenvectors to keep, 1 <= r <= p.

    Returns
    -------
    (p, r) array with orthonormal columns, ordered by ascending eigenvalue,
    each column signed so its first nonzero component is positive.
    """
    M = check_symmetric(M)
    p = M.shape[0]
    if not 1 <= r <= p:
        raise ValueError(f"r must be in [1, {p}], got {r}")
    _, vecs = np.linalg.eigh(M)
    return _fix_column_signs(vecs[:, :r].copy())


def sym_eig_largest(M, r):
    """Orthonormal eigenvectors of the r largest eigenvalues (descending)."""
    M = check_symmetric(M)
    p = M.shape[0]
    if not 1 <= r <= p:
        raise ValueError(f"r must be in [1, {p}], got {r}")
    _, vecs = np.linalg.eigh(M)
    return _fix_column_signs(vecs[:, : p - r - 1 : -1].copy())


def posneg_split(M):
    """Split M into nonnegative parts (M+, M-) with M = M+ - M-.

    M+ = (|M| + M) / 2 and M- = (|M| - M) / 2; the parts have disjoint
    support, so min(M+, M-) == 0 elementwise.
    """
    M = np.asarray(M, dtype=float)
    absM = np.abs(M)
    return 0.5 * (absM + M), 0.5 * (absM - M)


def spd_pinverse(M, rcond=1e-12):
    """Inverse of a symmetric PSD matrix, pseudo-inverse if rank-deficient.

    Eigenvalues below ``rcond * lambda_max`` are treated as exactly zero.
    """
    M = check_symmetric(M)
    vals, vecs = np.linalg.eigh(M)
    cutoff = rcond * max(float(vals.max(initial=0.0)), 0.0)
    inv_vals = np.where(vals > cutoff, 1.0 / np.where(vals > cutoff, vals, 1.0), 0.0)
    return (vecs * inv_vals) @ vecs.T
