"""Finite-dimensional reproducing kernel Hilbert spaces.

Every space carries an orthonormal basis ``e_0, ..., e_{dim-1}`` of functions
on its domain; the reproducing kernel at ``lam`` has coefficient vector
``conj(e_n(lam))`` in that basis, so all inner products are plain complex dot
products.

Domain points are complex numbers for the disk models (closed unit disk) and
integer row indices for finite point sets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import ArityMismatch, OutOfDomain

# points with |lam| <= 1 + this count as inside the closed disk
DISK_SLACK = 1e-12


class KernelVector(NamedTuple):
    coeffs: np.ndarray
    norm: float


@dataclass(frozen=True)
class _DiskSpace:
    n: int

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError("truncation order must be >= 1")

    @property
    def dim(self) -> int:
        return self.n

    @property
    def is_disk(self) -> bool:
        return True

    def weights(self) -> np.ndarray:
        raise NotImplementedError

    def check_point(self, lam) -> complex:
        z = complex(lam)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)) or abs(z) > 1.0 + DISK_SLACK:
            raise OutOfDomain(f"{lam!r} is outside the closed unit disk")
        return z

    def basis(self, z) -> np.ndarray:
        """Values ``e_n(z)`` with shape ``z.shape + (dim,)``."""
        z = np.asarray(z, dtype=np.complex128)
        powers = z[..., None] ** np.arange(self.n)
        return powers * self.weights()

    def coeff_rows(self, z) -> np.ndarray:
        """Kernel coefficient vectors for a batch of points, one row each."""
        return np.conj(self.basis(z))

    def descriptor(self) -> str:
        return f"{self.kind}:{self.n}"


@dataclass(frozen=True)
class TruncatedHardy(_DiskSpace):
    """Span of ``1, z, ..., z^(n-1)`` with the Hardy inner product."""

    kind = "hardy"

    def weights(self) -> np.ndarray:
        return np.ones(self.n)


@dataclass(frozen=True)
class TruncatedBergman(_DiskSpace):
    """Span of ``sqrt(k+1) z^k`` for ``k < n``, orthonormal in the Bergman space."""

    kind = "bergman"

    def weights(self) -> np.ndarray:
        return np.sqrt(np.arange(1, self.n + 1, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class FiniteSet:
    """RKHS on a finite point set given by a table of basis values.

    ``features[i, n]`` is ``e_n`` evaluated at point ``i``.
    """

    features: np.ndarray
    labels: tuple = field(default=())

    kind = "finite"

    def __post_init__(self):
        feats = np.array(self.features, dtype=np.complex128)
        if feats.ndim == 1:
            feats = feats[:, None]
        if feats.ndim != 2 or feats.shape[0] < 1 or feats.shape[1] < 1:
            raise ValueError("feature table must be a non-empty 2-D array")
        if not np.all(np.isfinite(feats)):
            raise ValueError("feature table has non-finite entries")
        if np.any(np.all(feats == 0, axis=1)):
            raise ValueError("feature table has an all-zero row; its kernel cannot be normalized")
        feats.setflags(write=False)
        object.__setattr__(self, "features", feats)
        labels = tuple(self.labels) if self.labels else tuple(range(feats.shape[0]))
        if len(labels) != feats.shape[0]:
            raise ValueError("one label per point required")
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def size(self) -> int:
        return self.features.shape[0]

    @property
    def is_disk(self) -> bool:
        return False

    def check_point(self, lam) -> int:
        if isinstance(lam, (bool, np.bool_)) or not isinstance(lam, (int, np.integer)):
            raise OutOfDomain(f"finite-set points are integer indices, got {lam!r}")
        if not 0 <= int(lam) < self.size:
            raise OutOfDomain(f"point index {lam} not in [0, {self.size})")
        return int(lam)

    def basis(self, idx) -> np.ndarray:
        return self.features[np.asarray(idx, dtype=np.intp)]

    def coeff_rows(self, idx) -> np.ndarray:
        return np.conj(self.basis(idx))

    def descriptor(self) -> str:
        return f"finite:<{self.size} points, dim {self.dim}>"


SpaceModel = Union[TruncatedHardy, TruncatedBergman, FiniteSet]


@dataclass(frozen=True)
class DirectSumSpace:
    """Orthogonal direct sum over the product of the component domains."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) < 2:
            raise ArityMismatch("a direct sum needs at least two components")
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return sum(c.dim for c in self.components)

    @property
    def dims(self) -> tuple:
        return tuple(c.dim for c in self.components)

    def __len__(self) -> int:
        return len(self.components)


def components_of(space) -> tuple:
    """Component list of a space; a plain space is its own single component."""
    if isinstance(space, DirectSumSpace):
        return space.components
    return (space,)


def block_offsets(space: DirectSumSpace) -> tuple:
    offsets, acc = [], 0
    for c in space.components:
        offsets.append(acc)
        acc += c.dim
    return tuple(offsets)


def kernel_vec(space: SpaceModel, lam) -> KernelVector:
    """Coefficients of ``k_lam`` in the orthonormal basis, and its norm."""
    point = space.check_point(lam)
    coeffs = space.coeff_rows(point)
    return KernelVector(coeffs, float(np.linalg.norm(coeffs)))


def normalized_kernel(space: SpaceModel, lam) -> np.ndarray:
    kv = kernel_vec(space, lam)
    return kv.coeffs / kv.norm


def direct_sum_kernel(space: DirectSumSpace, lams: Sequence) -> np.ndarray:
    """Stacked kernels ``(k_lam1, ..., k_lamn)`` scaled to a unit vector."""
    lams = tuple(lams)
    if len(lams) != len(space.components):
        raise ArityMismatch(f"expected {len(space.components)} points, got {len(lams)}")
    parts = [kernel_vec(c, lam).coeffs for c, lam in zip(space.components, lams)]
    stacked = np.concatenate(parts)
    return stacked / np.linalg.norm(stacked)


def load_feature_table(path) -> FiniteSet:
    """Read ``{"points": [...], "features": [[[re, im], ...], ...]}``."""
    with open(path) as fh:
        obj = json.load(fh)
    try:
        labels = tuple(obj["points"])
        rows = obj["features"]
        feats = np.array(
            [[complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v) for v in row] for row in rows],
            dtype=np.complex128,
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ValueError(f"malformed feature table {path}: {exc}") from exc
    return FiniteSet(feats, labels)


def parse_space(descriptor: str, base_dir=None) -> SpaceModel:
    """Parse ``hardy:N``, ``bergman:N`` or ``finite:<path>``."""
    kind, sep, arg = descriptor.partition(":")
    if not sep or not arg:
        raise ValueError(f"bad space descriptor {descriptor!r}")
    if kind in ("hardy", "bergman"):
        try:
            n = int(arg)
        except ValueError:
            raise ValueError(f"bad truncation order in {descriptor!r}") from None
        if n < 1:
            raise ValueError(f"truncation order must be >= 1 in {descriptor!r}")
        return TruncatedHardy(n) if kind == "hardy" else TruncatedBergman(n)
    if kind == "finite":
        path = Path(arg)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return load_feature_table(path)
    raise ValueError(f"unknown space kind {kind!r}")
