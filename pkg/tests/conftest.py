import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.linalg import expm

from gausswork.symplectic import symplectic_form

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_symplectic(rng: np.random.Generator, n: int, scale: float = 0.6) -> np.ndarray:
    """exp(Omega H) with H symmetric is symplectic."""
    h = rng.normal(scale=scale, size=(2 * n, 2 * n))
    return expm(symplectic_form(n) @ (h + h.T) / 2)


def williamson_state(rng: np.random.Generator, n: int, nus=None) -> tuple[np.ndarray, np.ndarray]:
    """Random physical state S diag(nu, nu) S^T with known symplectic spectrum."""
    if nus is None:
        nus = 0.5 + rng.exponential(1.0, size=n)
    s = random_symplectic(rng, n)
    d = np.diag(np.repeat(nus, 2))
    return s @ d @ s.T, np.sort(nus)[::-1]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
