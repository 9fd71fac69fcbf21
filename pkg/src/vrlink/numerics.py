"""Dense complex matrix kernel: SVD with a fixed phase convention, plus
element-wise modulus normalization.

The factorization itself is delegated to LAPACK via numpy; this module pins
down the conventions the beamforming stages rely on (descending singular
values, reproducible singular-vector phases, tolerance policy).
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

# Tolerance policy for double precision at the matrix sizes used here (<= 8x8).
FACTOR_TOL = 1e-9       # relative Frobenius error of factorization identities
MODULUS_TOL = 1e-12     # per-entry modulus checks
ZERO_MODULUS = 1e-15    # entries below this are treated as zero-phase


def ensure_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate and return ``m`` as a finite, non-empty 2-D complex128 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(
            f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class SvdResult:
    """Full SVD ``M = left @ diag(singular_values) @ right.conj().T``.

    ``left`` is m x m unitary, ``right`` is n x n unitary, and
    ``singular_values`` holds min(m, n) non-negative reals, descending.
    """

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        m = self.left.shape[0]
        n = self.right.shape[0]
        sigma = np.zeros((m, n))
        k = self.singular_values.shape[0]
        sigma[:k, :k] = np.diag(self.singular_values)
        return self.left @ sigma @ self.right.conj().T


def _pivot_phase(column: np.ndarray) -> complex:
    """Phase of the largest-magnitude entry of a vector (1 for a zero vector)."""
    idx = int(np.argmax(np.abs(column)))
    pivot = column[idx]
    mag = abs(pivot)
    if mag <= ZERO_MODULUS:
        return 1.0 + 0.0j
    return pivot / mag


def svd(m) -> SvdResult:
    """Singular value decomposition with a reproducible sign/phase convention.

    Each left singular vector is rotated so its largest-magnitude entry is
    real and non-negative; the paired right vector absorbs the same rotation
    so the product is unchanged. Unpaired right columns (n > m) get the same
    convention applied independently since they never touch the reconstruction.
    """
    a = ensure_complex_matrix(m)
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    v = vh.conj().T.copy()
    u = u.copy()
    k = min(a.shape)
    for col in range(u.shape[1]):
        phase = np.conj(_pivot_phase(u[:, col]))
        u[:, col] *= phase
        if col < k:
            v[:, col] *= phase
    for col in range(k, v.shape[1]):
        v[:, col] *= np.conj(_pivot_phase(v[:, col]))
    return SvdResult(left=u, singular_values=s, right=v)


def unit_modulus_normalize(m, target_modulus: float) -> np.ndarray:
    """Force every entry to modulus ``target_modulus`` while keeping its phase.

    Entries with modulus below ``ZERO_MODULUS`` have no usable phase and map
    to the real value ``target_modulus``.
    """
    if not target_modulus > 0:
        raise InvalidInputError(f"target modulus must be positive, got {target_modulus}")
    a = ensure_complex_matrix(m)
    mags = np.abs(a)
    out = np.empty_like(a)
    degenerate = mags < ZERO_MODULUS
    out[degenerate] = target_modulus
    out[~degenerate] = target_modulus * a[~degenerate] / mags[~degenerate]
    return out
