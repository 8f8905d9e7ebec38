"""Faces of the unit cube, cubical subcomplexes, and box regions.

A ``Face`` pins a subset of coordinates of ``I^n`` to 0 or 1; a
``CubicalComplex`` is a downward-closed union of faces stored by its
maximal faces.  ``BoxRegion`` is a finite union of axis-aligned closed
boxes and carries the shrunken chambers and boundary collars, which are
not unions of faces.  All values are immutable after construction and
safe to share between threads.

Coordinate axes are 1-based throughout the public surface.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, DimensionError

__all__ = [
    "Face",
    "CubicalComplex",
    "Box",
    "BoxRegion",
    "full_cube",
    "boundary_complex",
    "j_complex",
    "skeleton",
    "chamber_region",
    "j_delta_region",
    "face_projection",
    "positive_faces",
    "intersect_complex_face",
    "intersect_region_face",
    "dist_to_complex",
    "dist_to_region",
    "face_grid",
    "complex_grid",
    "complex_random",
    "region_grid",
    "region_random",
]

MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True)
class Face:
    """A face of I^n: coordinates in ``pinned`` are fixed to 0 or 1."""

    ambient_dim: int
    pinned: tuple[tuple[int, int], ...]  # sorted ((axis, value), ...), axes 1-based

    def __post_init__(self):
        if self.ambient_dim < 0:
            raise DomainError("ambient dimension must be non-negative")
        axes = [a for a, _ in self.pinned]
        if len(set(axes)) != len(axes):
            raise DomainError(f"duplicate pinned axes in {self.pinned!r}")
        for a, v in self.pinned:
            if not 1 <= a <= self.ambient_dim:
                raise DomainError(f"pinned axis {a} out of range 1..{self.ambient_dim}")
            if v not in (0, 1):
                raise DomainError(f"pinned value must be 0 or 1, got {v!r}")
        object.__setattr__(self, "pinned", tuple(sorted(self.pinned)))

    @property
    def dim(self) -> int:
        return self.ambient_dim - len(self.pinned)

    @property
    def free_axes(self) -> tuple[int, ...]:
        fixed = {a for a, _ in self.pinned}
        return tuple(a for a in range(1, self.ambient_dim + 1) if a not in fixed)

    def subface_of(self, other: "Face") -> bool:
        """True when this face is contained in ``other`` (more pins, same values)."""
        if self.ambient_dim != other.ambient_dim:
            return False
        mine = dict(self.pinned)
        return all(mine.get(a) == v for a, v in other.pinned)

    def contains(self, point, tol: float = MEMBERSHIP_TOL) -> bool:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.ambient_dim,):
            raise DimensionError(
                f"point of dimension {point.shape} against ambient {self.ambient_dim}"
            )
        if np.any(point < -tol) or np.any(point > 1.0 + tol):
            return False
        return all(abs(point[a - 1] - v) <= tol for a, v in self.pinned)

    def describe(self) -> str:
        if not self.pinned:
            return f"I^{self.ambient_dim}"
        return "&".join(f"t{a}={v}" for a, v in self.pinned)


def _normalize_faces(faces) -> tuple[Face, ...]:
    """Drop duplicates and faces dominated by another face; sort deterministically."""
    unique = sorted(set(faces), key=lambda f: f.pinned)
    keep = []
    for f in unique:
        if any(f is not g and f.subface_of(g) for g in unique):
            continue
        keep.append(f)
    return tuple(keep)


@dataclass(frozen=True)
class CubicalComplex:
    """A downward-closed union of faces of I^n, stored by maximal faces."""

    ambient_dim: int
    maximal_faces: tuple[Face, ...]

    def __post_init__(self):
        for f in self.maximal_faces:
            if f.ambient_dim != self.ambient_dim:
                raise DimensionError(
                    f"face {f.describe()} has ambient {f.ambient_dim}, "
                    f"complex has {self.ambient_dim}"
                )
        object.__setattr__(self, "maximal_faces", _normalize_faces(self.maximal_faces))

    @property
    def dim(self) -> int:
        if not self.maximal_faces:
            return -1
        return max(f.dim for f in self.maximal_faces)

    @property
    def is_empty(self) -> bool:
        return not self.maximal_faces

    def contains(self, point, tol: float = MEMBERSHIP_TOL) -> bool:
        return any(f.contains(point, tol) for f in self.maximal_faces)

    def faces(self, min_dim: int = 0) -> tuple[Face, ...]:
        """All subfaces of the complex with dimension >= min_dim."""
        seen = set()
        for f in self.maximal_faces:
            free = f.free_axes
            for r in range(len(free) + 1):
                if f.dim - r < min_dim:
                    continue
                for axes in itertools.combinations(free, r):
                    for vals in itertools.product((0, 1), repeat=r):
                        pins = tuple(sorted(f.pinned + tuple(zip(axes, vals))))
                        seen.add(Face(self.ambient_dim, pins))
        return tuple(sorted(seen, key=lambda f: (f.dim, f.pinned)))

    def is_subcomplex_of(self, other: "CubicalComplex") -> bool:
        return all(
            any(f.subface_of(g) for g in other.maximal_faces) for f in self.maximal_faces
        )

    def union(self, other: "CubicalComplex") -> "CubicalComplex":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError("union of complexes with different ambient dimensions")
        return CubicalComplex(self.ambient_dim, self.maximal_faces + other.maximal_faces)

    def describe(self) -> str:
        if not self.maximal_faces:
            return "(empty)"
        return " | ".join(f.describe() for f in self.maximal_faces)


@dataclass(frozen=True)
class Box:
    """A closed axis-aligned box inside [0, 1]^n."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        for lo, hi in self.intervals:
            if not lo <= hi:
                raise DomainError(f"bad interval [{lo}, {hi}]")

    @property
    def ambient_dim(self) -> int:
        return len(self.intervals)

    def contains(self, point, tol: float = MEMBERSHIP_TOL) -> bool:
        point = np.asarray(point, dtype=float)
        return all(
            lo - tol <= point[i] <= hi + tol for i, (lo, hi) in enumerate(self.intervals)
        )


@dataclass(frozen=True)
class BoxRegion:
    """A finite union of boxes; carrier for chambers and boundary collars."""

    boxes: tuple[Box, ...]

    def __post_init__(self):
        dims = {b.ambient_dim for b in self.boxes}
        if len(dims) > 1:
            raise DimensionError("boxes of mixed ambient dimension")

    @property
    def ambient_dim(self) -> int:
        return self.boxes[0].ambient_dim if self.boxes else 0

    def contains(self, point, tol: float = MEMBERSHIP_TOL) -> bool:
        return any(b.contains(point, tol) for b in self.boxes)


def full_cube(n: int) -> CubicalComplex:
    if n < 0:
        raise DomainError("dimension must be non-negative")
    return CubicalComplex(n, (Face(n, ()),))


def boundary_complex(n: int) -> CubicalComplex:
    """The 2n codimension-1 faces of I^n."""
    if n < 1:
        raise DomainError("boundary needs dimension >= 1")
    faces = [Face(n, ((j, v),)) for j in range(1, n + 1) for v in (0, 1)]
    return CubicalComplex(n, tuple(faces))


def j_complex(n: int) -> CubicalComplex:
    """The boundary of I^n minus the open bottom face: side walls plus the top.

    The top is the face with the last coordinate pinned to 1; the walls pin
    any earlier coordinate.  For n = 1 this degenerates to the point t1 = 1.
    """
    if n < 1:
        raise DomainError("need dimension >= 1")
    faces = [Face(n, ((n, 1),))]
    faces += [Face(n, ((j, v),)) for j in range(1, n) for v in (0, 1)]
    return CubicalComplex(n, tuple(faces))


def skeleton(K: CubicalComplex, j: int) -> CubicalComplex:
    """All faces of K with dimension <= j."""
    if j < 0:
        raise DomainError("skeleton dimension must be >= 0")
    faces = [f for f in K.faces() if f.dim <= j]
    return CubicalComplex(K.ambient_dim, tuple(faces))


def chamber_region(K: CubicalComplex, eps: float) -> BoxRegion:
    """Per maximal face, shrink the free coordinates to [eps, 1-eps]."""
    if not 0.0 < eps <= 0.5:
        raise DomainError(f"chamber width must satisfy 0 < eps <= 1/2, got {eps!r}")
    boxes = []
    for f in K.maximal_faces:
        pins = dict(f.pinned)
        ivals = tuple(
            (float(pins[a]), float(pins[a])) if a in pins else (eps, 1.0 - eps)
            for a in range(1, K.ambient_dim + 1)
        )
        boxes.append(Box(ivals))
    return BoxRegion(tuple(boxes))


def j_delta_region(n: int, delta: float) -> BoxRegion:
    """The boundary of I^n minus the open core of the bottom face.

    Equals ``j_complex(n)`` as boxes plus, for each of the first n-1 axes,
    the closed bottom-face collars where that axis is within delta of 0
    or 1.
    """
    if n < 1:
        raise DomainError("need dimension >= 1")
    if not 0.0 < delta < 0.5:
        raise DomainError(f"collar width must satisfy 0 < delta < 1/2, got {delta!r}")
    boxes = []
    for f in j_complex(n).maximal_faces:
        pins = dict(f.pinned)
        boxes.append(
            Box(
                tuple(
                    (float(pins[a]), float(pins[a])) if a in pins else (0.0, 1.0)
                    for a in range(1, n + 1)
                )
            )
        )
    for k in range(1, n):
        for lo, hi in ((0.0, delta), (1.0 - delta, 1.0)):
            ivals = [(0.0, 1.0)] * n
            ivals[k - 1] = (lo, hi)
            ivals[n - 1] = (0.0, 0.0)
            boxes.append(Box(tuple(ivals)))
    return BoxRegion(tuple(boxes))


def face_projection(point, j: int, alpha: int):
    """Replace coordinate j (1-based) of the point by alpha."""
    point = np.asarray(point, dtype=float)
    n = point.shape[-1]
    if not 1 <= j <= n:
        raise DomainError(f"axis {j} out of range 1..{n}")
    if alpha not in (0, 1):
        raise DomainError(f"face value must be 0 or 1, got {alpha!r}")
    out = point.copy()
    out[..., j - 1] = float(alpha)
    return out


def positive_faces(n: int) -> tuple[Face, ...]:
    """All faces of I^n of positive dimension, I^n itself included."""
    return tuple(f for f in full_cube(n).faces(min_dim=1))


def intersect_complex_face(K: CubicalComplex, F: Face) -> CubicalComplex:
    """The subcomplex K intersected with the face F (possibly empty)."""
    faces = []
    fpins = dict(F.pinned)
    for g in K.maximal_faces:
        gpins = dict(g.pinned)
        if any(a in gpins and gpins[a] != v for a, v in fpins.items()):
            continue
        merged = dict(gpins)
        merged.update(fpins)
        faces.append(Face(K.ambient_dim, tuple(sorted(merged.items()))))
    return CubicalComplex(K.ambient_dim, tuple(faces))


def intersect_region_face(R: BoxRegion, F: Face) -> BoxRegion:
    boxes = []
    fpins = dict(F.pinned)
    for b in R.boxes:
        ivals = list(b.intervals)
        ok = True
        for a, v in fpins.items():
            lo, hi = ivals[a - 1]
            if lo - MEMBERSHIP_TOL <= v <= hi + MEMBERSHIP_TOL:
                ivals[a - 1] = (float(v), float(v))
            else:
                ok = False
                break
        if ok:
            boxes.append(Box(tuple(ivals)))
    return BoxRegion(tuple(boxes))


# ---------------------------------------------------------------------------
# vectorized distances and sampling


def _dist_to_face(F: Face, pts: np.ndarray) -> np.ndarray:
    """Max-norm distance from each row to the face as a subset of [0,1]^n."""
    d = np.zeros(len(pts))
    # distance to the ambient box in the free coordinates
    excess = np.maximum(np.maximum(-pts, pts - 1.0), 0.0)
    d = np.max(excess, axis=1, initial=0.0)
    for a, v in F.pinned:
        d = np.maximum(d, np.abs(pts[:, a - 1] - v))
    return d


def dist_to_complex(K: CubicalComplex, pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if K.is_empty:
        return np.full(len(pts), np.inf)
    return np.min([_dist_to_face(f, pts) for f in K.maximal_faces], axis=0)


def _dist_to_box(b: Box, pts: np.ndarray) -> np.ndarray:
    d = np.zeros(len(pts))
    for i, (lo, hi) in enumerate(b.intervals):
        d = np.maximum(d, np.maximum(lo - pts[:, i], pts[:, i] - hi))
    return np.maximum(d, 0.0)


def dist_to_region(R: BoxRegion, pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if not R.boxes:
        return np.full(len(pts), np.inf)
    return np.min([_dist_to_box(b, pts) for b in R.boxes], axis=0)


def box_grid(b: Box, res: int) -> np.ndarray:
    """Row-major grid over a box; degenerate axes contribute a single value."""
    axes = [
        np.array([lo]) if lo == hi else np.linspace(lo, hi, res) for lo, hi in b.intervals
    ]
    mesh = np.meshgrid(*axes, indexing="ij") if axes else []
    if not mesh:
        return np.zeros((1, 0))
    return np.stack([m.ravel() for m in mesh], axis=1)


def face_grid(F: Face, res: int) -> np.ndarray:
    pins = dict(F.pinned)
    ivals = tuple(
        (float(pins[a]), float(pins[a])) if a in pins else (0.0, 1.0)
        for a in range(1, F.ambient_dim + 1)
    )
    return box_grid(Box(ivals), res)


def complex_grid(K: CubicalComplex, res: int) -> np.ndarray:
    if K.is_empty:
        return np.zeros((0, K.ambient_dim))
    pts = np.concatenate([face_grid(f, res) for f in K.maximal_faces], axis=0)
    return np.unique(pts, axis=0)


def complex_random(K: CubicalComplex, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` seeded uniform points on each maximal face."""
    if K.is_empty or count <= 0:
        return np.zeros((0, K.ambient_dim))
    chunks = []
    for f in K.maximal_faces:
        pts = rng.uniform(size=(count, K.ambient_dim))
        for a, v in f.pinned:
            pts[:, a - 1] = float(v)
        chunks.append(pts)
    return np.concatenate(chunks, axis=0)


def region_grid(R: BoxRegion, res: int) -> np.ndarray:
    if not R.boxes:
        return np.zeros((0, R.ambient_dim))
    pts = np.concatenate([box_grid(b, res) for b in R.boxes], axis=0)
    return np.unique(pts, axis=0)


def region_random(R: BoxRegion, count: int, rng: np.random.Generator) -> np.ndarray:
    if not R.boxes or count <= 0:
        return np.zeros((0, R.ambient_dim))
    chunks = []
    for b in R.boxes:
        lo = np.array([iv[0] for iv in b.intervals])
        hi = np.array([iv[1] for iv in b.intervals])
        pts = rng.uniform(size=(count, len(b.intervals)))
        chunks.append(lo + pts * (hi - lo))
    return np.concatenate(chunks, axis=0)
