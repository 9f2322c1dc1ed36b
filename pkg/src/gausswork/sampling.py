"""Deterministic rejection sampling of random states from each family.

Proposals are drawn in fixed-size blocks. Block ``k`` of a run seeded with
``seed`` uses its own counter-based Philox stream keyed by ``(seed, k)``, so
the accepted set depends only on ``(family, count, seed, ranges, only)`` and
never on how many worker processes produced the blocks.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import LowAcceptanceWarning
from .states import (
    FAMILIES,
    build_symmetric_mixed_tripartite,
    from_record,
    general_tripartite_matrix,
    npt_flags,
    pure_tripartite_matrix,
    standard_form_matrix,
    sts_c_max,
)
from .symplectic import is_physical

BLOCK_SIZE = 4096
LOW_ACCEPTANCE = 1e-3

PARAM_NAMES = {
    "sym-sts": ("a", "c"),
    "sts": ("a", "b", "c"),
    "standard": ("a", "b", "c", "d"),
    "pure-tri": ("a", "b", "c"),
    "sym-pure-tri": ("a",),
    "sym-mixed-tri": ("a",),
    "general-tri": ("a", "b", "c") + tuple(f"c{i}" for i in range(1, 10)),
}

# Local variances are absolute intervals. Correlations that are not listed here
# are drawn as a fraction of a family-specific bound (see _draw).
DEFAULT_RANGES = {
    "sym-sts": {"a": (0.5, 5.0)},
    "sts": {"a": (0.5, 5.0), "b": (0.5, 5.0)},
    "standard": {"a": (0.5, 5.0), "b": (0.5, 5.0)},
    "pure-tri": {"a": (0.5, 3.0), "b": (0.5, 3.0), "c": (0.5, 3.0)},
    "sym-pure-tri": {"a": (0.5, 5.0)},
    "sym-mixed-tri": {"a": (0.5, 5.0)},
    "general-tri": {
        "a": (0.5, 3.0), "b": (0.5, 3.0), "c": (0.5, 3.0),
        **{f"c{i}": (-2.0, 2.0) for i in range(1, 10)},
    },
}  # fmt: skip


def family_matrices(family: str, values: np.ndarray) -> np.ndarray:
    """Covariance matrices for rows of parameter values (columns as in ``PARAM_NAMES``)."""
    v = np.asarray(values, dtype=float)
    col = lambda i: v[..., i]  # noqa: E731
    if family == "sym-sts":
        return standard_form_matrix(col(0), col(0), col(1), -col(1))
    if family == "sts":
        return standard_form_matrix(col(0), col(1), col(2), -col(2))
    if family == "standard":
        return standard_form_matrix(col(0), col(1), col(2), col(3))
    if family == "pure-tri":
        return pure_tripartite_matrix(col(0), col(1), col(2))
    if family == "sym-pure-tri":
        return pure_tripartite_matrix(col(0), col(0), col(0))
    if family == "sym-mixed-tri":
        return np.stack([build_symmetric_mixed_tripartite(float(a)) for a in np.atleast_1d(col(0))]).reshape(v.shape[:-1] + (6, 6))
    if family == "general-tri":
        return general_tripartite_matrix(col(0), col(1), col(2), v[..., 3:])
    raise ValueError(f"unknown family {family!r}")


def _uniform(rng: np.random.Generator, lo, hi, size: int) -> np.ndarray:
    return lo + (hi - lo) * rng.random(size)


def _draw(family: str, rng: np.random.Generator, size: int, ranges: dict) -> np.ndarray:
    names = PARAM_NAMES[family]
    cols = {}
    for name in names:
        if name in ranges:
            cols[name] = _uniform(rng, *ranges[name], size)
        elif family == "sym-sts" and name == "c":
            cols[name] = rng.random(size) * sts_c_max(cols["a"], cols["a"])
        elif family == "sts" and name == "c":
            a, b = cols["a"], cols["b"]
            box = np.sqrt(np.maximum((a + 0.5) * (b - 0.5), (a - 0.5) * (b + 0.5)))
            cols[name] = rng.random(size) * box
        elif family == "standard" and name in ("c", "d"):
            cols[name] = (2.0 * rng.random(size) - 1.0) * np.sqrt(cols["a"] * cols["b"])
        else:
            raise ValueError(f"no range given for parameter {name!r} of family {family!r}")
    return np.column_stack([cols[n] for n in names])


def _accept(family: str, values: np.ndarray, only: str | None) -> np.ndarray:
    sigma = family_matrices(family, values)
    finite = np.all(np.isfinite(sigma), axis=(-1, -2))
    ok = np.zeros(len(values), dtype=bool)
    if finite.any():
        ok[finite] = is_physical(sigma[finite])
    if only is not None and ok.any():
        npt = npt_flags(sigma[ok]).any(axis=-1)
        keep = npt if only == "entangled" else ~npt
        ok[np.flatnonzero(ok)[~keep]] = False
    return ok


def block_generator(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_block(family: str, seed: int, index: int, ranges: dict, only: str | None = None,
                 block_size: int = BLOCK_SIZE) -> np.ndarray:
    """Accepted parameter rows of proposal block ``index``."""
    draws = _draw(family, block_generator(seed, index), block_size, ranges)
    return draws[_accept(family, draws, only)]


@dataclass
class SampleSet:
    family: str
    names: tuple[str, ...]
    values: np.ndarray
    proposals: int
    seed: int
    ranges: dict = field(default_factory=dict)
    accepted: int = 0  # accepted rows in all consumed blocks, before truncation to ``count``

    def __len__(self) -> int:
        return len(self.values)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 0.0

    def matrices(self) -> np.ndarray:
        return family_matrices(self.family, self.values)

    def records(self) -> Iterator[dict]:
        for row in self.values:
            rec = {"family": self.family, **{n: float(x) for n, x in zip(self.names, row)}, "seed": self.seed}
            if self.family == "sym-sts":
                rec["b"] = rec["a"]
            if self.family in ("sym-sts", "sts"):
                rec["d"] = -rec["c"]
            yield rec

    def params(self):
        return [from_record(r) for r in self.records()]


def sample_random(
    family: str,
    count: int,
    seed: int,
    ranges: dict | None = None,
    only: str | None = None,
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
    max_proposals: int = 10**9,
) -> SampleSet:
    """Draw ``count`` physical states of ``family`` uniformly within ``ranges``.

    ``ranges`` maps parameter names to ``(lo, hi)`` and overrides the defaults.
    ``only`` restricts the output to ``"separable"`` or ``"entangled"`` (PPT) states.
    Emits :class:`LowAcceptanceWarning` when fewer than one proposal in a
    thousand is accepted.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    if count <= 0:
        raise ValueError("count must be positive")
    if only not in (None, "separable", "entangled"):
        raise ValueError("only must be None, 'separable' or 'entangled'")
    merged = {**DEFAULT_RANGES[family], **(ranges or {})}
    unknown = set(merged) - set(PARAM_NAMES[family])
    if unknown:
        raise ValueError(f"unknown parameters {sorted(unknown)} for family {family!r}")

    chunks: list[np.ndarray] = []
    have = 0
    used_blocks = 0
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        next_block = 0
        while have < count:
            if used_blocks * block_size >= max_proposals:
                raise RuntimeError(f"{family}: only {have} of {count} states accepted after {max_proposals} proposals")
            batch = range(next_block, next_block + max(workers, 1))
            next_block = batch.stop
            args = [(family, seed, k, merged, only, block_size) for k in batch]
            results = pool.map(_sample_block_star, args) if pool else map(_sample_block_star, args)
            for rows in results:
                if have >= count:
                    break
                chunks.append(rows)
                have += len(rows)
                used_blocks += 1
    finally:
        if pool is not None:
            pool.shutdown()

    values = np.concatenate(chunks)[:count]
    out = SampleSet(family, PARAM_NAMES[family], values, used_blocks * block_size, seed, merged, have)
    if out.acceptance_rate < LOW_ACCEPTANCE:
        warnings.warn(f"{family}: acceptance rate {out.acceptance_rate:.2e} is below {LOW_ACCEPTANCE}", LowAcceptanceWarning, stacklevel=2)
    return out


def _sample_block_star(args):
    return sample_block(*args)
