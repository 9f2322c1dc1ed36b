"""Extractable work from Gaussian states under local Gaussian measurements.

All values are in units of k_B T (natural logarithms). Work extracted by
Alice is the drop of her Renyi-2 entropy caused by the back-action of the
other parties' measurements, with her own initial state as the thermal
reference:

    W = 0.5 * ln(det sigma_a / det sigma_a^{pi})

Closed forms for the squeezed-thermal families live next to the generic
matrix pipeline so that each can be checked against the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParams, QuadratureFailure
from .measurements import (
    GaussianMeasurement,
    _add_readout,
    conditional_bipartite,
    conditional_tripartite,
)
from .states import (
    GeneralTripartiteParams,
    PureTripartiteParams,
    SqueezedThermalParams,
    SymmetricTripartiteParams,
    TwoModeStandardForm,
    sigma_prime_c_sep,
    standard_form_matrix,
    sts_c_max,
)
from .symplectic import det2, mode_count

GUARD_BAND = 1e-9
AVG_TOL = 1e-10
MAX_NODES = 2**14
START_NODES = 16
AVG_CHUNK = 1024


@dataclass(frozen=True)
class WorkResult:
    """Work in units of k_B T; ``value`` is an array when a stack of states was evaluated."""

    value: float | np.ndarray
    path: str
    averaged: bool = False
    measurements: tuple = field(default=())

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        value = self.value.tolist() if isinstance(self.value, np.ndarray) else float(self.value)
        return {
            "W": value,
            "units": "k_B T",
            "path": self.path,
            "averaged": self.averaged,
            "measurements": [m.to_dict() for m in self.measurements],
        }


def _scalar(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _log_det_ratio(num: np.ndarray, den: np.ndarray):
    return 0.5 * np.log(det2(num) / det2(den))


# ---------------------------------------------------------------------------
# closed forms for squeezed thermal states


def _strength(lam: float) -> float:
    # W depends on lambda only through the unordered pair {lambda, 1/lambda}.
    if math.isinf(lam):
        return 0.0
    if lam < 0:
        raise InvalidParams(f"measurement strength must be >= 0, got {lam}")
    return float(lam)


def _check_sts(a, b, c):
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    if np.any(a < 0.5) or np.any(b < 0.5):
        raise InvalidParams("local variances must satisfy a, b >= 1/2")
    if np.any(np.abs(c) > sts_c_max(a, b) * (1 + 1e-12) + 1e-12):
        raise InvalidParams("|c| exceeds the physical bound of the squeezed thermal family")
    return a, b, c


def _sts_value(a, b, c, lam):
    lam = _strength(lam)
    det_term = 2.0 * (a * b - c * c)
    k0 = a * (2 * b + lam) / (det_term + a * lam)
    k1 = a * (2 * b * lam + 1) / (det_term * lam + a)
    return 0.5 * (np.log(k0) + np.log(k1))


def work_sts_closed(a, b, c, lam: float) -> WorkResult:
    """Angle-independent work for a squeezed thermal state measured with strength ``lam``."""
    a, b, c = _check_sts(a, b, c)
    return WorkResult(_scalar(_sts_value(a, b, c, lam)), "closed:sts")


def work_symmetric_closed(a, c, lam: float) -> WorkResult:
    a, _, c = _check_sts(a, a, c)
    return WorkResult(_scalar(_sts_value(a, a, c, lam)), "closed:sym-sts")


def work_sep_symmetric(a, lam: float) -> WorkResult:
    """Work at the separability threshold c = a - 1/2 of a symmetric squeezed thermal state."""
    a = np.asarray(a, dtype=float)
    lam = _strength(lam)
    k0 = 2 * a * (2 * a + lam) / ((4 * a - 1) + 2 * a * lam)
    k1 = 2 * a * (2 * a * lam + 1) / ((4 * a - 1) * lam + 2 * a)
    return WorkResult(_scalar(0.5 * (np.log(k0) + np.log(k1))), "closed:sym-sts:sep")


def work_sep_sts(a, b, lam: float) -> WorkResult:
    """Work at the separability threshold c^2 = (a - 1/2)(b - 1/2) of a squeezed thermal state."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    lam = _strength(lam)
    k0 = 2 * a * (2 * b + lam) / ((2 * a + 2 * b - 1) + 2 * a * lam)
    k1 = 2 * a * (2 * b * lam + 1) / ((2 * a + 2 * b - 1) * lam + 2 * a)
    return WorkResult(_scalar(0.5 * (np.log(k0) + np.log(k1))), "closed:sts:sep")


def work_max_symmetric(a) -> WorkResult:
    """Work of the two-mode squeezed vacuum, the same for every measurement strength."""
    return WorkResult(_scalar(np.log(2 * np.asarray(a, dtype=float))), "closed:sym-sts:max")


def work_max_sts(a, b, lam: float) -> WorkResult:
    """Squeezed-thermal work at the physical boundary |c| = c_max(a, b)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return WorkResult(_scalar(_sts_value(a, b, sts_c_max(a, b), lam)), "closed:sts:max")


def work_max_sts_homodyne(a, b) -> WorkResult:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return WorkResult(_scalar(0.5 * np.log(4 * a * b / (1 + 2 * np.abs(a - b)))), "closed:sts:max:homodyne")


def work_max_sts_heterodyne(a, b) -> WorkResult:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    other = 2 * a * (1 + 2 * b) / np.where(a <= b, 1.0, 1 + 4 * a - 2 * b)
    value = np.where(a <= b, np.log(2 * a), np.log(other))
    return WorkResult(_scalar(value), "closed:sts:max:heterodyne")


# ---------------------------------------------------------------------------
# generic pipeline


def work_one_measurement(sigma_ab: np.ndarray, m: GaussianMeasurement, angle=None) -> WorkResult:
    """Work Alice extracts after Bob's measurement ``m`` on a two-mode state (or stack).

    ``angle`` overrides ``m.angle``; an array of angles broadcasts against the stack.
    """
    sigma_ab = np.asarray(sigma_ab, dtype=float)
    cond = conditional_bipartite(sigma_ab, m, angle)
    value = _log_det_ratio(sigma_ab[..., :2, :2], cond)
    return WorkResult(_scalar(value), "generic", False, (m,))


def angle_average(
    func: Callable[..., np.ndarray],
    dims: int = 1,
    tol: float = AVG_TOL,
    max_nodes: int | None = None,
    start: int = START_NODES,
    period: float = 2.0 * np.pi,
) -> np.ndarray:
    """Mean of a periodic function over ``dims`` angles.

    ``func`` receives ``dims`` flat arrays of angles (a product grid) and
    returns values with the grid on the last axis. The trapezoid rule is
    spectrally accurate for smooth periodic integrands, so the node count per
    axis is doubled until successive estimates differ by less than ``tol``.
    Nodes cover one ``period``; measurement integrands repeat every pi.

    Raises:
        QuadratureFailure: if the total node count would exceed ``max_nodes``
            (default: the module constant ``MAX_NODES``, read at call time).
    """
    return batched_angle_average(lambda idx, *angles: func(*angles), None, dims, tol, max_nodes, start, period)


def batched_angle_average(
    func: Callable[..., np.ndarray],
    count: int | None,
    dims: int = 1,
    tol: float = AVG_TOL,
    max_nodes: int | None = None,
    start: int = START_NODES,
    period: float = 2.0 * np.pi,
) -> np.ndarray:
    """Angle average of ``count`` independent integrands, each refined only until it converges.

    ``func(idx, *angles)`` evaluates the integrands listed in the index array
    ``idx`` and returns shape ``(len(idx), n_nodes)``. With ``count=None`` a
    single integrand of any batch shape is averaged as a whole.
    """
    cap = MAX_NODES if max_nodes is None else max_nodes
    n = start
    active = None if count is None else np.arange(count)
    result = None if count is None else np.empty(count)
    previous = None
    while True:
        grid = period * np.arange(n) / n
        axes = [ax.ravel() for ax in np.meshgrid(*([grid] * dims), indexing="ij")]
        estimate = np.mean(func(active, *axes), axis=-1)
        if previous is not None:
            delta = np.abs(estimate - previous)
            if count is None:
                if np.max(delta) < tol:
                    return estimate
            else:
                done = delta < tol
                result[active[done]] = estimate[done]
                active, estimate = active[~done], estimate[~done]
                if not len(active):
                    return result
        if (2 * n) ** dims > cap:
            raise QuadratureFailure(f"angle average not converged with {n ** dims} nodes", active)
        previous = estimate
        n *= 2


def _stack_average(sigma: np.ndarray, integrand, dims: int, tol: float, max_nodes: int):
    """Average ``integrand(states, *angles)`` for one matrix or a stack of matrices.

    Seeds satisfy gamma(phi + pi) = gamma(phi), so half a turn of nodes suffices.
    """
    if sigma.ndim == 2:
        return angle_average(lambda *ang: integrand(sigma[None, None], *ang)[0], dims, tol, max_nodes, period=np.pi)
    flat = sigma.reshape((-1,) + sigma.shape[-2:])
    out = np.empty(len(flat))
    for i in range(0, len(flat), AVG_CHUNK):
        block = flat[i : i + AVG_CHUNK]
        try:
            out[i : i + len(block)] = batched_angle_average(
                lambda idx, *ang: integrand(block[idx][:, None], *ang), len(block), dims, tol, max_nodes, period=np.pi
            )
        except QuadratureFailure as exc:
            raise QuadratureFailure(str(exc), [i + k for k in exc.indices]) from None
    return out.reshape(sigma.shape[:-2])


def work_avg_angle(sigma_ab: np.ndarray, lam: float, tol: float = AVG_TOL, max_nodes: int | None = None) -> WorkResult:
    """One-measurement work averaged over Bob's measurement angle."""
    m = GaussianMeasurement(lam)
    sigma_ab = np.asarray(sigma_ab, dtype=float)
    value = _stack_average(sigma_ab, lambda s, phi: work_one_measurement(s, m, phi).value, 1, tol, max_nodes)
    return WorkResult(_scalar(value), "generic", True, (m,))


def work_sep_sigma_prime(a, b, lam: float, phi) -> WorkResult:
    """Work of the boundary state with c_ab = diag(c, 0) at measurement angle ``phi``."""
    a, b, phi = (np.asarray(x, dtype=float) for x in (a, b, phi))
    if math.isinf(lam):
        # infinite strength measures the orthogonal quadrature
        lam, phi = 0.0, phi + np.pi / 2
    num = 16 * a * a * b * (2 * b + lam) * (2 * b * lam + 1)
    den = (
        (4 * a * a - 1) * (4 * b * b - 1) * (lam * lam - 1) * np.cos(2 * phi)
        + 4 * a * a * (4 * b * b * (lam * lam + 1) + 8 * b * lam + lam * lam + 1)
        + (4 * b * b - 1) * (4 * b * lam + lam * lam + 1)
    )
    return WorkResult(_scalar(0.5 * np.log(num / den)), "closed:sigma-prime:sep")


def separable_bound_general(a, b, lam: float, tol: float = AVG_TOL) -> WorkResult:
    """Upper bound on angle-averaged work from separable standard-form states.

    The larger of the squeezed-thermal threshold and the angle average of the
    ``c_ab = diag(c, 0)`` boundary state. ``path`` names the dominant branch
    for scalar input.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    sts = np.asarray(work_sep_sts(a, b, lam).value)
    prime = angle_average(lambda phi: work_sep_sigma_prime(a[..., None], b[..., None], lam, phi).value, 1, tol, period=np.pi)
    value = np.maximum(sts, prime)
    if value.ndim:
        path = "bound:max"
    else:
        path = "bound:sts" if sts >= prime else "bound:sigma-prime"
    return WorkResult(_scalar(value), path, True)


def sigma_prime_matrix(a: float, b: float) -> np.ndarray:
    return standard_form_matrix(a, b, sigma_prime_c_sep(a, b), 0.0)


# ---------------------------------------------------------------------------
# two measurements


def work_two_measurements(
    sigma_ab: np.ndarray,
    m_b: GaussianMeasurement,
    m_a: GaussianMeasurement,
    angle_b=None,
    angle_a=None,
) -> WorkResult:
    """Work extracted from the register of both outcomes (Bob measures first, then Alice).

    With homodyne on Alice's side the outcome is one-dimensional and the
    entropies are those of the projected variances.
    """
    sigma_ab = np.asarray(sigma_ab, dtype=float)
    cond = conditional_bipartite(sigma_ab, m_b, angle_b)
    before = _add_readout(sigma_ab[..., :2, :2], m_a, angle_a)
    after = _add_readout(cond, m_a, angle_a)
    return WorkResult(_scalar(_log_det_ratio(before, after)), "generic:two", False, (m_b.at(mode=1), m_a.at(mode=0)))


def work_two_measurements_avg(
    sigma_ab: np.ndarray,
    m_b: GaussianMeasurement,
    m_a: GaussianMeasurement,
    tol: float = AVG_TOL,
    max_nodes: int | None = None,
) -> WorkResult:
    """Two-measurement work averaged over both measurement angles on a product grid."""
    sigma_ab = np.asarray(sigma_ab, dtype=float)
    value = _stack_average(
        sigma_ab, lambda s, pb, pa: work_two_measurements(s, m_b, m_a, pb, pa).value, 2, tol, max_nodes
    )
    return WorkResult(_scalar(value), "generic:two", True, (m_b.at(mode=1), m_a.at(mode=0)))


def work_two_heterodyne_symmetric(a, c) -> WorkResult:
    a, c = np.asarray(a, dtype=float), np.asarray(c, dtype=float)
    value = 0.5 * np.log((2 * a + 1) ** 4 / ((2 * a + 1) ** 2 - 4 * c * c) ** 2)
    return WorkResult(_scalar(value), "closed:sym-sts:two-heterodyne")


def work_two_homodyne_symmetric(a, c, phi, theta) -> WorkResult:
    a, c = np.asarray(a, dtype=float), np.asarray(c, dtype=float)
    psi = np.asarray(phi, dtype=float) + np.asarray(theta, dtype=float)
    value = 0.5 * np.log(2 * a * a / (2 * a * a - c * c * (np.cos(2 * psi) + 1)))
    return WorkResult(_scalar(value), "closed:sym-sts:two-homodyne")


def wehrl_mutual_info(sigma_ab: np.ndarray):
    """Mutual information of the Husimi distributions, via sigma + identity/2."""
    tilde = np.asarray(sigma_ab, dtype=float) + 0.5 * np.eye(4)
    return _scalar(0.5 * np.log(np.linalg.det(tilde[..., :2, :2]) * np.linalg.det(tilde[..., 2:, 2:]) / np.linalg.det(tilde)))


def renyi2_mutual_info(sigma_ab: np.ndarray):
    """Renyi-2 mutual information 0.5 * ln(I1 I2 / I4) of a two-mode state."""
    s = np.asarray(sigma_ab, dtype=float)
    return _scalar(0.5 * np.log(np.linalg.det(s[..., :2, :2]) * np.linalg.det(s[..., 2:, 2:]) / np.linalg.det(s)))


def _condition_quadrature(s: np.ndarray, j: int) -> np.ndarray:
    keep = [i for i in range(s.shape[-1]) if i != j]
    col = s[..., keep, j]
    out = s[..., keep, :][..., :, keep] - col[..., :, None] * col[..., None, :] / s[..., j, j][..., None, None]
    return out


def work_homodyne_qp(sigma_ab: np.ndarray) -> WorkResult:
    """Sum of two sequential homodyne works: Bob reads x_b, then p_b of the updated joint state."""
    s = np.asarray(sigma_ab, dtype=float)
    after_q = _condition_quadrature(s, 2)  # order (x_a, p_a, p_b)
    after_qp = _condition_quadrature(after_q, 2)
    first = _log_det_ratio(s[..., :2, :2], after_q[..., :2, :2])
    second = _log_det_ratio(after_q[..., :2, :2], after_qp)
    return WorkResult(_scalar(first + second), "generic:homodyne-qp")


# ---------------------------------------------------------------------------
# three modes


def work_tripartite(
    sigma_abc: np.ndarray,
    m_b: GaussianMeasurement,
    m_c: GaussianMeasurement,
    angle_b=None,
    angle_c=None,
) -> WorkResult:
    """Alice's work after Charlie (mode 2) and then Bob (mode 1) measure."""
    sigma_abc = np.asarray(sigma_abc, dtype=float)
    if mode_count(sigma_abc) != 3:
        raise ValueError("expected a three-mode covariance matrix")
    cond = conditional_tripartite(sigma_abc, m_c, m_b, angle_c, angle_b)
    value = _log_det_ratio(sigma_abc[..., :2, :2], cond)
    return WorkResult(_scalar(value), "generic:tri", False, (m_b.at(mode=1), m_c.at(mode=2)))


def _rotation_invariant(m: GaussianMeasurement) -> bool:
    return m.strength == 1.0


def work_tripartite_avg(
    sigma_abc: np.ndarray,
    m_b: GaussianMeasurement,
    m_c: GaussianMeasurement,
    tol: float = AVG_TOL,
    max_nodes: int | None = None,
) -> WorkResult:
    """Tripartite work averaged over the angles of every non-heterodyne measurement."""
    sigma_abc = np.asarray(sigma_abc, dtype=float)
    free = [not _rotation_invariant(m) for m in (m_b, m_c)]
    if not any(free):
        res = work_tripartite(sigma_abc, m_b, m_c)
        return WorkResult(res.value, res.path, True, res.measurements)

    def integrand(s, *angles):
        it = iter(angles)
        ab = next(it) if free[0] else None
        ac = next(it) if free[1] else None
        return work_tripartite(s, m_b, m_c, ab, ac).value

    value = _stack_average(sigma_abc, integrand, sum(free), tol, max_nodes)
    return WorkResult(_scalar(value), "generic:tri", True, (m_b.at(mode=1), m_c.at(mode=2)))


# ---------------------------------------------------------------------------
# thresholds and witness


def thresholds(params, lam: float) -> dict[str, float]:
    """Separability threshold ``W_sep`` and maximum ``W_max`` for a family member."""
    if isinstance(params, SqueezedThermalParams):
        if params.is_symmetric:
            return {"W_sep": float(work_sep_symmetric(params.a, lam)), "W_max": float(work_max_symmetric(params.a))}
        return {"W_sep": float(work_sep_sts(params.a, params.b, lam)), "W_max": float(work_max_sts(params.a, params.b, lam))}
    if isinstance(params, TwoModeStandardForm):
        return {
            "W_sep": float(separable_bound_general(params.a, params.b, lam)),
            "W_max": float(work_max_sts(params.a, params.b, lam)),
        }
    if isinstance(params, (PureTripartiteParams, SymmetricTripartiteParams, GeneralTripartiteParams)):
        return {"W_max": float(np.log(2 * params.a))}
    raise TypeError(f"no thresholds for {type(params).__name__}")


def witness(value, threshold, necessary: bool = True, guard: float = GUARD_BAND):
    """Entanglement verdict from comparing work with a separable threshold.

    Within ``guard`` of the threshold the answer is ``"inconclusive"``. When the
    threshold is only sufficient (``necessary=False``), values below it give
    ``"undetected"`` rather than ``"separable"``.
    """
    diff = np.asarray(value, dtype=float) - np.asarray(threshold, dtype=float)
    below = "separable" if necessary else "undetected"
    out = np.where(diff > guard, "entangled", np.where(diff < -guard, below, "inconclusive"))
    return str(out) if out.ndim == 0 else out
