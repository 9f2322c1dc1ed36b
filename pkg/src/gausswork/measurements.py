"""Gaussian measurements with pure seeds and the conditioning pipelines built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .symplectic import condition_on_measurement, mode_count, rotation


@dataclass(frozen=True)
class GaussianMeasurement:
    """General-dyne measurement of strength ``strength`` along ``angle``.

    The seed covariance is ``R(angle) diag(strength/2, 1/(2 strength)) R(angle)^T``.
    ``strength == 0`` is homodyne of the quadrature at ``angle``; ``strength == 1``
    is heterodyne; ``strength == inf`` is homodyne of the orthogonal quadrature.
    """

    strength: float
    angle: float = 0.0
    mode: int = 1

    def __post_init__(self):
        if not self.strength >= 0.0:
            raise ValueError(f"measurement strength must be >= 0, got {self.strength}")

    @property
    def is_homodyne(self) -> bool:
        return self.strength == 0.0 or math.isinf(self.strength)

    @property
    def homodyne_angle(self) -> float:
        """Angle of the measured quadrature in the homodyne limits."""
        if math.isinf(self.strength):
            return self.angle + math.pi / 2
        return self.angle

    def at(self, angle=None, mode: int | None = None) -> "GaussianMeasurement":
        return GaussianMeasurement(
            self.strength,
            self.angle if angle is None else angle,
            self.mode if mode is None else mode,
        )

    def to_dict(self) -> dict:
        strength = "inf" if math.isinf(self.strength) else self.strength
        return {"lambda": strength, "phi": self.angle, "mode": self.mode}


def homodyne(angle: float = 0.0, mode: int = 1) -> GaussianMeasurement:
    return GaussianMeasurement(0.0, angle, mode)


def heterodyne(mode: int = 1) -> GaussianMeasurement:
    return GaussianMeasurement(1.0, 0.0, mode)


@dataclass(frozen=True)
class HomodyneSeed:
    """Limit marker for an infinitely squeezed seed; ``projector`` selects the measured quadrature."""

    angle: float

    @property
    def projector(self) -> np.ndarray:
        r = rotation(self.angle)
        return r @ np.diag([1.0, 0.0]) @ r.T


def seed_covariance(m: GaussianMeasurement, angle=None):
    """Seed covariance of ``m``; a :class:`HomodyneSeed` in the homodyne limits.

    ``angle`` overrides ``m.angle`` and may be an array, in which case a stack of
    2x2 matrices is returned.
    """
    phi = m.angle if angle is None else angle
    if m.is_homodyne:
        if math.isinf(m.strength):
            phi = np.asarray(phi) + math.pi / 2
        return HomodyneSeed(phi)
    lam = m.strength
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(phi), np.sin(phi)
    big, small = lam / 2.0, 1.0 / (2.0 * lam)
    out = np.empty(phi.shape + (2, 2))
    out[..., 0, 0] = big * c * c + small * s * s
    out[..., 1, 1] = big * s * s + small * c * c
    out[..., 0, 1] = out[..., 1, 0] = (big - small) * c * s
    return out


def _condition(sigma: np.ndarray, m: GaussianMeasurement, angle=None) -> np.ndarray:
    seed = seed_covariance(m, angle)
    if isinstance(seed, HomodyneSeed):
        return condition_on_measurement(sigma, m.mode, homodyne_angle=seed.angle)
    return condition_on_measurement(sigma, m.mode, gamma=seed)


def conditional_bipartite(sigma_ab: np.ndarray, m: GaussianMeasurement, angle=None) -> np.ndarray:
    """Alice's 2x2 covariance after Bob's measurement ``m`` (mode 1 by default)."""
    if mode_count(sigma_ab) != 2:
        raise ValueError("expected a two-mode covariance matrix")
    return _condition(sigma_ab, m, angle)


def conditional_tripartite(
    sigma_abc: np.ndarray,
    m_c: GaussianMeasurement,
    m_b: GaussianMeasurement,
    angle_c=None,
    angle_b=None,
) -> np.ndarray:
    """Alice's covariance after Charlie measures mode 2 and then Bob measures mode 1."""
    if mode_count(sigma_abc) != 3:
        raise ValueError("expected a three-mode covariance matrix")
    sigma_ab = _condition(sigma_abc, m_c.at(mode=2), angle_c)
    return _condition(sigma_ab, m_b.at(mode=1), angle_b)


def outcome_covariance_two_measurements(
    sigma_ab: np.ndarray,
    m_b: GaussianMeasurement,
    m_a: GaussianMeasurement,
    angle_b=None,
    angle_a=None,
) -> np.ndarray:
    """Covariance of Alice's outcome distribution given Bob's outcome.

    For a finite-strength ``m_a`` this is ``sigma_a^{pi_b} + gamma^{pi_a}`` (2x2).
    When Alice performs homodyne the outcome is one-dimensional and a 1x1
    matrix holding the variance of the measured quadrature is returned.
    """
    cond = conditional_bipartite(sigma_ab, m_b, angle_b)
    return _add_readout(cond, m_a, angle_a)


def _add_readout(cov: np.ndarray, m_a: GaussianMeasurement, angle_a=None) -> np.ndarray:
    seed = seed_covariance(m_a, angle_a)
    if isinstance(seed, HomodyneSeed):
        phi = np.asarray(seed.angle, dtype=float)
        u = np.stack([np.cos(phi), np.sin(phi)], axis=-1)[..., :, None]
        return np.swapaxes(u, -1, -2) @ cov @ u
    return cov + seed
