"""Dense covariance-matrix algebra for one to three bosonic modes.

Conventions: hbar = 1, vacuum quadrature variance 1/2, quadratures ordered
(x1, p1, x2, p2, ...), symplectic form built from 2x2 blocks [[0, 1], [-1, 0]].

Covariance matrices are plain ``numpy`` arrays of shape ``(2n, 2n)``. Every
kernel also accepts stacks of shape ``(..., 2n, 2n)`` so that populations of
random states can be processed without a Python loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    InvalidModeSet,
    NonPositiveDefinite,
    NonPositiveDeterminant,
    SingularConditioning,
)

VACUUM = 0.5
PHYSICAL_TOL = 1e-9
MAX_MODES = 3

_SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class SymplecticInvariants:
    """Local/global determinants of a two-mode covariance matrix."""

    I1: float
    I2: float
    I3: float
    I4: float

    @property
    def Delta(self) -> float:
        return self.I1 + self.I2 + 2.0 * self.I3


def rotation(phi: float) -> np.ndarray:
    """Phase-space rotation by ``phi`` radians."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def mode_count(sigma: np.ndarray) -> int:
    dim = np.shape(sigma)[-1]
    if dim % 2 or np.shape(sigma)[-2] != dim:
        raise ValueError(f"covariance matrix must be square of even size, got {np.shape(sigma)}")
    return dim // 2


def as_covariance(entries) -> np.ndarray:
    """Validate and return a covariance matrix (or stack) as a float array.

    Asymmetry above round-off is rejected; round-off asymmetry is removed so
    the returned array is exactly symmetric.
    """
    sigma = np.array(entries, dtype=float)
    n = mode_count(sigma)
    if n > MAX_MODES:
        raise ValueError(f"at most {MAX_MODES} modes are supported, got {n}")
    if not np.all(np.isfinite(sigma)):
        raise ValueError("covariance matrix has non-finite entries")
    sigma_t = np.swapaxes(sigma, -1, -2)
    scale = max(1.0, float(np.max(np.abs(sigma))))
    if np.max(np.abs(sigma - sigma_t)) > _SYMMETRY_TOL * scale:
        raise ValueError("covariance matrix is not symmetric")
    return 0.5 * (sigma + sigma_t)


def quadrature_indices(modes: Iterable[int]) -> list[int]:
    return [i for m in modes for i in (2 * m, 2 * m + 1)]


def submatrix(sigma: np.ndarray, rows: Iterable[int], cols: Iterable[int] | None = None) -> np.ndarray:
    """Block of ``sigma`` between the listed modes (not quadratures)."""
    r = quadrature_indices(rows)
    c = r if cols is None else quadrature_indices(cols)
    return sigma[..., r, :][..., :, c]


def _min_eigenvalue(sigma: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(sigma)[..., 0]


def symplectic_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    """Symplectic spectrum, ``n`` values per matrix in descending order.

    Computed as the moduli of the (purely imaginary) eigenvalues of
    ``Omega @ sigma``; each value appears twice and pairs are merged after
    sorting.

    Raises:
        NonPositiveDefinite: if any matrix in the stack is not positive definite.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = mode_count(sigma)
    if np.any(_min_eigenvalue(sigma) <= 0.0):
        raise NonPositiveDefinite("covariance matrix is not positive definite")
    moduli = np.sort(np.abs(np.linalg.eigvals(symplectic_form(n) @ sigma)), axis=-1)
    paired = 0.5 * (moduli[..., 0::2] + moduli[..., 1::2])
    return paired[..., ::-1]


def is_physical(sigma: np.ndarray, tol: float = PHYSICAL_TOL):
    """True where the smallest symplectic eigenvalue is at least 1/2 - tol.

    Returns a bool for a single matrix and a bool array for a stack.
    Non-positive-definite matrices are simply unphysical.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = mode_count(sigma)
    pd = _min_eigenvalue(sigma) > 0.0
    moduli = np.sort(np.abs(np.linalg.eigvals(symplectic_form(n) @ sigma)), axis=-1)
    ok = pd & (moduli[..., 0] >= VACUUM - tol)
    return bool(ok) if np.ndim(ok) == 0 else ok


def partial_transpose(sigma: np.ndarray, modes: Iterable[int]) -> np.ndarray:
    """Flip the sign of the momentum quadrature of every mode in ``modes``."""
    sigma = np.asarray(sigma, dtype=float)
    n = mode_count(sigma)
    modes = sorted(set(modes))
    if not modes or len(modes) >= n or modes[0] < 0 or modes[-1] >= n:
        raise InvalidModeSet(f"modes {modes} must be a non-empty strict subset of range({n})")
    flip = np.ones(2 * n)
    flip[[2 * m + 1 for m in modes]] = -1.0
    return sigma * flip[:, None] * flip[None, :]


def renyi2_entropy(sigma: np.ndarray):
    """Gaussian Renyi-2 entropy ``0.5 * ln det sigma`` in nats."""
    det = np.linalg.det(np.asarray(sigma, dtype=float))
    if np.any(det <= 0.0):
        raise NonPositiveDeterminant("determinant must be positive")
    return 0.5 * np.log(det)


def symplectic_invariants(sigma: np.ndarray) -> SymplecticInvariants:
    sigma = np.asarray(sigma, dtype=float)
    if mode_count(sigma) != 2 or sigma.ndim != 2:
        raise ValueError("invariants are defined here for a single two-mode matrix")
    return SymplecticInvariants(
        I1=float(np.linalg.det(sigma[:2, :2])),
        I2=float(np.linalg.det(sigma[2:, 2:])),
        I3=float(np.linalg.det(sigma[:2, 2:])),
        I4=float(np.linalg.det(sigma)),
    )


def det2(m: np.ndarray) -> np.ndarray:
    """Determinant of 2x2 (or 1x1) matrices in a stack."""
    if m.shape[-1] == 1:
        return m[..., 0, 0]
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def _inv2(m: np.ndarray) -> np.ndarray:
    det = det2(m)
    if np.any(~(np.abs(det) > 1e-300)):
        raise SingularConditioning("sigma_B + gamma is singular")
    adj = np.empty_like(m)
    adj[..., 0, 0] = m[..., 1, 1]
    adj[..., 1, 1] = m[..., 0, 0]
    adj[..., 0, 1] = -m[..., 0, 1]
    adj[..., 1, 0] = -m[..., 1, 0]
    return adj / det[..., None, None]


def condition_on_measurement(
    sigma: np.ndarray,
    mode: int,
    gamma: np.ndarray | None = None,
    homodyne_angle=None,
) -> np.ndarray:
    """Covariance of the unmeasured modes after a Gaussian measurement on ``mode``.

    Exactly one of ``gamma`` (the 2x2 seed covariance of a general-dyne
    measurement) or ``homodyne_angle`` must be given. The homodyne branch is
    the exact infinitely-squeezed limit: with ``u = (cos phi, sin phi)`` the
    measured quadrature, the update is ``sigma_A - (C u)(C u)^T / (u^T sigma_B u)``.

    Both ``gamma`` and ``homodyne_angle`` broadcast against the stack
    dimensions of ``sigma``. The result is independent of the outcome.
    """
    if (gamma is None) == (homodyne_angle is None):
        raise ValueError("give exactly one of gamma or homodyne_angle")
    sigma = np.asarray(sigma, dtype=float)
    n = mode_count(sigma)
    if not 0 <= mode < n or n < 2:
        raise InvalidModeSet(f"cannot measure mode {mode} of a {n}-mode state")
    rest = [m for m in range(n) if m != mode]
    s_a = submatrix(sigma, rest)
    c = submatrix(sigma, rest, [mode])
    s_b = submatrix(sigma, [mode])

    # Rank-two updates are written elementwise: far faster than stacked matmul on 2x2 blocks.
    if homodyne_angle is not None:
        phi = np.asarray(homodyne_angle, dtype=float)
        u0, u1 = np.cos(phi), np.sin(phi)
        cu = c[..., :, 0] * u0[..., None] + c[..., :, 1] * u1[..., None]
        var = s_b[..., 0, 0] * u0 * u0 + 2.0 * s_b[..., 0, 1] * u0 * u1 + s_b[..., 1, 1] * u1 * u1
        if np.any(~(var > 0.0)):
            raise SingularConditioning("measured quadrature has zero variance")
        out = s_a - cu[..., :, None] * cu[..., None, :] / var[..., None, None]
    else:
        inv = _inv2(s_b + np.asarray(gamma, dtype=float))
        k0 = c[..., :, 0] * inv[..., None, 0, 0] + c[..., :, 1] * inv[..., None, 1, 0]
        k1 = c[..., :, 0] * inv[..., None, 0, 1] + c[..., :, 1] * inv[..., None, 1, 1]
        out = s_a - (k0[..., :, None] * c[..., None, :, 0] + k1[..., :, None] * c[..., None, :, 1])
    return 0.5 * (out + np.swapaxes(out, -1, -2))
