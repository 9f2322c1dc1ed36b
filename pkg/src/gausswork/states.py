"""State families, their parameter records, separability thresholds and PPT classification."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import ClassVar

import numpy as np

from .errors import InvalidTriple, Unphysical, UnsupportedModeCount
from .symplectic import (
    PHYSICAL_TOL,
    VACUUM,
    is_physical,
    mode_count,
    partial_transpose,
    symplectic_eigenvalues,
)

# PPT decisions are made on exactly computed spectra; this only absorbs round-off.
PPT_TOL = 1e-12

MODE_NAMES = "abc"


# ---------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class TwoModeStandardForm:
    """sigma_a = diag(a, a), sigma_b = diag(b, b), c_ab = diag(c, d)."""

    a: float
    b: float
    c: float
    d: float
    family: ClassVar[str] = "standard"


@dataclass(frozen=True)
class SqueezedThermalParams:
    """Two-mode squeezed thermal state: standard form with d = -c."""

    a: float
    b: float
    c: float

    @classmethod
    def symmetric(cls, a: float, c: float) -> "SqueezedThermalParams":
        return cls(a, a, c)

    @property
    def d(self) -> float:
        return -self.c

    @property
    def is_symmetric(self) -> bool:
        return self.a == self.b

    @property
    def family(self) -> str:
        return "sym-sts" if self.is_symmetric else "sts"


@dataclass(frozen=True)
class PureTripartiteParams:
    a: float
    b: float
    c: float
    family: ClassVar[str] = "pure-tri"


@dataclass(frozen=True)
class SymmetricTripartiteParams:
    """Permutation-invariant three-mode states; ``kind`` is ``"pure"`` or ``"mixed"``."""

    a: float
    kind: str = "mixed"

    def __post_init__(self):
        if self.kind not in ("pure", "mixed"):
            raise ValueError(f"kind must be 'pure' or 'mixed', got {self.kind!r}")

    @property
    def family(self) -> str:
        return f"sym-{self.kind}-tri"


@dataclass(frozen=True)
class GeneralTripartiteParams:
    """Twelve-parameter standard form; ``couplings`` holds c1..c9."""

    a: float
    b: float
    c: float
    couplings: tuple = field(default=(0.0,) * 9)
    family: ClassVar[str] = "general-tri"

    def __post_init__(self):
        if len(self.couplings) != 9:
            raise ValueError("general tripartite states need exactly nine couplings c1..c9")
        object.__setattr__(self, "couplings", tuple(float(x) for x in self.couplings))


StateParams = (
    TwoModeStandardForm
    | SqueezedThermalParams
    | PureTripartiteParams
    | SymmetricTripartiteParams
    | GeneralTripartiteParams
)

FAMILIES = ("sym-sts", "sts", "standard", "pure-tri", "sym-pure-tri", "sym-mixed-tri", "general-tri")


def to_record(params: StateParams) -> dict:
    """JSON-ready dict with the exact field names a, b, c, d, c1..c9 and family."""
    rec: dict = {"family": params.family}
    if isinstance(params, GeneralTripartiteParams):
        rec.update(a=params.a, b=params.b, c=params.c)
        rec.update({f"c{i + 1}": v for i, v in enumerate(params.couplings)})
    elif isinstance(params, SqueezedThermalParams):
        rec.update(a=params.a, b=params.b, c=params.c, d=params.d)
    elif isinstance(params, SymmetricTripartiteParams):
        rec.update(a=params.a)
    else:
        rec.update(asdict(params))
    return rec


def from_record(rec: dict) -> StateParams:
    family = rec["family"]
    get = lambda k: float(rec[k])  # noqa: E731
    if family == "sym-sts":
        return SqueezedThermalParams.symmetric(get("a"), get("c"))
    if family == "sts":
        return SqueezedThermalParams(get("a"), get("b"), get("c"))
    if family == "standard":
        return TwoModeStandardForm(get("a"), get("b"), get("c"), get("d"))
    if family == "pure-tri":
        return PureTripartiteParams(get("a"), get("b"), get("c"))
    if family in ("sym-pure-tri", "sym-mixed-tri"):
        return SymmetricTripartiteParams(get("a"), family.split("-")[1])
    if family == "general-tri":
        return GeneralTripartiteParams(get("a"), get("b"), get("c"), tuple(get(f"c{i}") for i in range(1, 10)))
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


# ---------------------------------------------------------------------------
# thresholds


def sts_c_sep(a, b):
    """Separability threshold on |c| for squeezed thermal states."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    out = np.where(a == b, a - 0.5, np.sqrt(np.abs((a - 0.5) * (b - 0.5))))
    return float(out) if out.ndim == 0 else out


def sts_c_max(a, b):
    """Largest physical |c| for a squeezed thermal state (two-mode squeezed vacuum when a == b)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    sym = np.sqrt(np.maximum(a * a - 0.25, 0.0))
    gen = np.sqrt(np.maximum(np.minimum((a + 0.5) * (b - 0.5), (a - 0.5) * (b + 0.5)), 0.0))
    out = np.where(a == b, sym, gen)
    return float(out) if out.ndim == 0 else out


def sigma_prime_c_sep(a, b):
    """Boundary |c| of states with c_ab = diag(c, 0); physicality and separability coincide there."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    out = np.sqrt((4 * a * a - 1) * (4 * b * b - 1) / (16 * a * b))
    return float(out) if out.ndim == 0 else out


def c_sep(params) -> float:
    """Separability threshold on |c| for a squeezed thermal state.

    General standard-form states have no single threshold (it depends on d).
    """
    if isinstance(params, SqueezedThermalParams):
        return sts_c_sep(params.a, params.b)
    raise TypeError(f"no closed-form separability threshold for {type(params).__name__}")


# ---------------------------------------------------------------------------
# constructors


def standard_form_matrix(a, b, c, d) -> np.ndarray:
    """Standard-form two-mode covariance matrix; broadcasts over array arguments."""
    a, b, c, d = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, b, c, d)))
    out = np.zeros(a.shape + (4, 4))
    out[..., 0, 0] = out[..., 1, 1] = a
    out[..., 2, 2] = out[..., 3, 3] = b
    out[..., 0, 2] = out[..., 2, 0] = c
    out[..., 1, 3] = out[..., 3, 1] = d
    return out


def _sts_bound_text(p: SqueezedThermalParams) -> str:
    if p.is_symmetric:
        return f"|c| <= sqrt(a^2 - 1/4) = {sts_c_max(p.a, p.a):.6g}"
    return f"|c| <= sqrt(min{{(a+1/2)(b-1/2), (a-1/2)(b+1/2)}}) = {sts_c_max(p.a, p.b):.6g}"


def build_two_mode(params: TwoModeStandardForm | SqueezedThermalParams, tol: float = PHYSICAL_TOL) -> np.ndarray:
    """4x4 covariance matrix of a standard-form or squeezed thermal state.

    Raises:
        Unphysical: local variance below 1/2 or correlations beyond the physical bound.
    """
    for name in ("a", "b"):
        if getattr(params, name) < VACUUM:
            raise Unphysical(f"{name} = {getattr(params, name)} violates {name} >= 1/2")
    sigma = standard_form_matrix(params.a, params.b, params.c, params.d)
    if not is_physical(sigma, tol):
        if isinstance(params, SqueezedThermalParams):
            raise Unphysical(f"c = {params.c} violates {_sts_bound_text(params)}")
        raise Unphysical(f"{params} has smallest symplectic eigenvalue below 1/2")
    return sigma


def pure_couplings_array(a, b, c):
    """Vectorized pure-state couplings: ``({pair: (xx, pp)}, valid)`` with NaN where invalid.

    For the pair (i, j) the third variance k is the one of the remaining mode.
    """
    variances = {"a": np.asarray(a, dtype=float), "b": np.asarray(b, dtype=float), "c": np.asarray(c, dtype=float)}
    out = {}
    valid = np.ones(np.broadcast_shapes(*(v.shape for v in variances.values())), dtype=bool)
    for pair in ("ab", "ac", "bc"):
        i, j = variances[pair[0]], variances[pair[1]]
        (k,) = (v for name, v in variances.items() if name not in pair)
        d_minus = (4 * (i - j) ** 2 - (2 * k - 1) ** 2) * (4 * (i - j) ** 2 - (2 * k + 1) ** 2)
        d_plus = (4 * (i + j) ** 2 - (2 * k - 1) ** 2) * (4 * (i + j) ** 2 - (2 * k + 1) ** 2)
        valid &= (d_minus >= -1e-12) & (d_plus >= -1e-12)
        s1, s2 = np.sqrt(np.maximum(d_minus, 0.0)), np.sqrt(np.maximum(d_plus, 0.0))
        norm = 16 * np.sqrt(i * j)
        out[pair] = ((s1 + s2) / norm, (s1 - s2) / norm)
    return out, valid


def pure_tripartite_couplings(a: float, b: float, c: float) -> dict[str, tuple[float, float]]:
    """Off-diagonal (x-x, p-p) entries for each pair of a pure three-mode state.

    Raises:
        InvalidTriple: if a discriminant is negative (no pure state with these purities).
    """
    coup, valid = pure_couplings_array(a, b, c)
    if not valid:
        raise InvalidTriple(f"(a, b, c) = ({a}, {b}, {c}) admits no pure state: negative discriminant")
    return {k: (float(x), float(y)) for k, (x, y) in coup.items()}


def pure_tripartite_matrix(a, b, c) -> np.ndarray:
    """Stack of pure-state matrices; rows for invalid triples contain NaN couplings."""
    coup, valid = pure_couplings_array(a, b, c)
    xx = {k: np.where(valid, v[0], np.nan) for k, v in coup.items()}
    pp = {k: np.where(valid, v[1], np.nan) for k, v in coup.items()}
    return _three_mode(a, b, c, xx, pp)


def _three_mode(a, b, c, xx: dict, pp: dict) -> np.ndarray:
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    shape = np.broadcast_shapes(a.shape, b.shape, c.shape, *(np.shape(v) for v in (*xx.values(), *pp.values())))
    sigma = np.zeros(shape + (6, 6))
    for m, v in enumerate((a, b, c)):
        sigma[..., 2 * m, 2 * m] = sigma[..., 2 * m + 1, 2 * m + 1] = v
    for pair, (p, q) in {"ab": (0, 1), "ac": (0, 2), "bc": (1, 2)}.items():
        sigma[..., 2 * p, 2 * q] = sigma[..., 2 * q, 2 * p] = xx[pair]
        sigma[..., 2 * p + 1, 2 * q + 1] = sigma[..., 2 * q + 1, 2 * p + 1] = pp[pair]
    return sigma


def build_pure_tripartite(params: PureTripartiteParams, purity_tol: float = 1e-8) -> np.ndarray:
    a, b, c = params.a, params.b, params.c
    if min(a, b, c) < VACUUM:
        raise InvalidTriple(f"local variances must be >= 1/2, got ({a}, {b}, {c})")
    coup = pure_tripartite_couplings(a, b, c)
    sigma = _three_mode(a, b, c, {k: v[0] for k, v in coup.items()}, {k: v[1] for k, v in coup.items()})
    if not is_physical(sigma) or np.max(np.abs(symplectic_eigenvalues(sigma) - VACUUM)) > purity_tol:
        raise InvalidTriple(f"(a, b, c) = ({a}, {b}, {c}) does not yield a pure state")
    return sigma


def symmetric_pure_couplings(a: float) -> tuple[float, float]:
    root = math.sqrt((4 * a * a - 1) * (36 * a * a - 1))
    return (4 * a * a - 1 + root) / (16 * a), (4 * a * a - 1 - root) / (16 * a)


def symmetric_mixed_couplings(a: float) -> tuple[float, float]:
    root = math.sqrt(36 * a * a * (4 * a * a - 2) + 25)
    return (4 * a * a - 5 + root) / (16 * a), (5 - 36 * a * a + root) / (48 * a)


def build_symmetric_mixed_tripartite(a: float) -> np.ndarray:
    """Fully symmetric mixed state: factorized at a = 1/2, fully inseparable above."""
    if a < VACUUM:
        raise Unphysical(f"a = {a} violates a >= 1/2")
    cp, cm = symmetric_mixed_couplings(a)
    pairs = ("ab", "ac", "bc")
    sigma = _three_mode(a, a, a, dict.fromkeys(pairs, cp), dict.fromkeys(pairs, cm))
    if not is_physical(sigma):
        raise Unphysical(f"symmetric mixed state with a = {a} is not physical")
    return sigma


def build_symmetric_pure_tripartite(a: float) -> np.ndarray:
    return build_pure_tripartite(PureTripartiteParams(a, a, a))


def general_tripartite_matrix(a, b, c, couplings) -> np.ndarray:
    """Twelve-parameter standard form; broadcasts when ``couplings`` has shape (..., 9)."""
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    k = np.asarray(couplings, dtype=float)
    c1, c2, c3, c4, c5, c6, c7, c8, c9 = np.moveaxis(k, -1, 0)
    shape = np.broadcast_shapes(a.shape, b.shape, c.shape, c1.shape)
    out = np.zeros(shape + (6, 6))
    entries = {
        (0, 0): a, (1, 1): a, (2, 2): b, (3, 3): b, (4, 4): c, (5, 5): c,
        (0, 2): c1, (1, 3): c2, (0, 4): c3, (1, 5): c4, (0, 5): c5,
        (2, 4): c6, (3, 5): c7, (2, 5): c8, (3, 4): c9,
    }  # fmt: skip
    for (i, j), v in entries.items():
        out[..., i, j] = out[..., j, i] = v
    return out


def build_general_tripartite(params: GeneralTripartiteParams, tol: float = PHYSICAL_TOL) -> np.ndarray:
    sigma = general_tripartite_matrix(params.a, params.b, params.c, params.couplings)
    if not is_physical(sigma, tol):
        raise Unphysical(f"{params} has smallest symplectic eigenvalue below 1/2")
    return sigma


def build_state(params: StateParams) -> np.ndarray:
    """Dispatch to the constructor for any parameter record."""
    if isinstance(params, (TwoModeStandardForm, SqueezedThermalParams)):
        return build_two_mode(params)
    if isinstance(params, PureTripartiteParams):
        return build_pure_tripartite(params)
    if isinstance(params, SymmetricTripartiteParams):
        if params.kind == "pure":
            return build_symmetric_pure_tripartite(params.a)
        return build_symmetric_mixed_tripartite(params.a)
    if isinstance(params, GeneralTripartiteParams):
        return build_general_tripartite(params)
    raise TypeError(f"unsupported parameter record {type(params).__name__}")


# ---------------------------------------------------------------------------
# classification


def bipartition_names(n_modes: int) -> list[str]:
    """Name of the bipartition obtained by transposing each single mode."""
    if n_modes == 2:
        return ["a|b"]
    return [f"{MODE_NAMES[m]}|{MODE_NAMES[:m] + MODE_NAMES[m + 1:n_modes]}" for m in range(n_modes)]


def transposed_min_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    """Smallest partially transposed symplectic eigenvalue for each single-mode bipartition.

    Shape ``(..., 1)`` for two modes and ``(..., 3)`` for three modes.
    """
    n = mode_count(sigma)
    if n not in (2, 3):
        raise UnsupportedModeCount(f"classification supports 2 or 3 modes, got {n}")
    modes = [1] if n == 2 else range(3)
    return np.stack([symplectic_eigenvalues(partial_transpose(sigma, [m]))[..., -1] for m in modes], axis=-1)


def npt_flags(sigma: np.ndarray, tol: float = PPT_TOL) -> np.ndarray:
    """True where the state is NPT (hence entangled) across the bipartition."""
    return transposed_min_eigenvalues(sigma) < VACUUM - tol


_CLASS_BY_NPT_COUNT = {3: "i", 2: "ii", 1: "iii", 0: "iv"}
CLASS_NAMES = {
    "i": "fully inseparable",
    "ii": "1-biseparable",
    "iii": "2-biseparable",
    "iv": "3-biseparable",
}


def class_label(npt: np.ndarray) -> str:
    """Compact label; classes (ii)/(iii) list their separable bipartitions, e.g. ``ii[c|ab]``."""
    npt = np.asarray(npt, dtype=bool)
    names = bipartition_names(3 if npt.size == 3 else 2)
    if npt.size == 1:
        return "entangled" if npt[0] else "separable"
    label = _CLASS_BY_NPT_COUNT[int(npt.sum())]
    if label in ("ii", "iii"):
        label += "[" + ",".join(n for n, f in zip(names, npt) if not f) + "]"
    return label


@dataclass(frozen=True)
class SeparabilityVerdict:
    """PPT verdict for every single-mode bipartition plus the overall label."""

    ppt: dict[str, bool]
    label: str
    min_transposed_eigenvalues: dict[str, float]

    @property
    def entangled(self) -> bool:
        return not all(self.ppt.values())

    @property
    def tripartite_class(self) -> str | None:
        if len(self.ppt) != 3:
            return None
        return self.label.split("[")[0]

    def to_dict(self) -> dict:
        out = {"label": self.label, "ppt": self.ppt, "min_transposed_eigenvalues": self.min_transposed_eigenvalues}
        if self.tripartite_class is not None:
            out["class"] = self.tripartite_class
            out["class_name"] = CLASS_NAMES[self.tripartite_class]
        return out


def classify(sigma: np.ndarray, tol: float = PPT_TOL) -> SeparabilityVerdict:
    """PPT classification of a two- or three-mode state.

    Two modes: ``separable``/``entangled``. Three modes: classes ``i``..``iv`` by
    the number of NPT bipartitions (3, 2, 1, 0).
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2:
        raise ValueError("classify takes a single covariance matrix")
    n = mode_count(sigma)
    if n not in (2, 3):
        raise UnsupportedModeCount(f"classification supports 2 or 3 modes, got {n}")
    nu = transposed_min_eigenvalues(sigma)
    npt = nu < VACUUM - tol
    names = bipartition_names(n)
    return SeparabilityVerdict(
        ppt={k: bool(not f) for k, f in zip(names, npt)},
        label=class_label(npt),
        min_transposed_eigenvalues={k: float(v) for k, v in zip(names, nu)},
    )
