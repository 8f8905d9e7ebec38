import numpy as np
import pytest

from tamecube.cubes import (
    Box,
    BoxRegion,
    CubicalComplex,
    Face,
    boundary_complex,
    chamber_region,
    complex_grid,
    dist_to_complex,
    face_grid,
    face_projection,
    full_cube,
    intersect_complex_face,
    j_complex,
    j_delta_region,
    positive_faces,
    region_grid,
    skeleton,
)
from tamecube.errors import DomainError


def test_boundary_complex_counts():
    assert len(boundary_complex(1).maximal_faces) == 2
    assert len(boundary_complex(2).maximal_faces) == 4
    assert len(boundary_complex(3).maximal_faces) == 6
    assert all(f.dim == 2 for f in boundary_complex(3).maximal_faces)
    with pytest.raises(DomainError):
        boundary_complex(0)


def test_j_complex_shape():
    assert [f.pinned for f in j_complex(1).maximal_faces] == [((1, 1),)]
    assert set(f.pinned for f in j_complex(2).maximal_faces) == {
        ((1, 0),),
        ((1, 1),),
        ((2, 1),),
    }
    faces3 = j_complex(3).maximal_faces
    assert len(faces3) == 5
    assert ((3, 0),) not in [f.pinned for f in faces3]


def test_skeleton():
    sk0 = skeleton(boundary_complex(2), 0)
    assert len(sk0.maximal_faces) == 4 and all(f.dim == 0 for f in sk0.maximal_faces)
    assert skeleton(j_complex(2), 1) == j_complex(2)
    sk1 = skeleton(boundary_complex(3), 1)
    assert len(sk1.maximal_faces) == 12 and all(f.dim == 1 for f in sk1.maximal_faces)
    assert skeleton(boundary_complex(2), 5) == boundary_complex(2)


def test_chamber_region():
    ch = chamber_region(full_cube(2), 0.25)
    assert ch.boxes == (Box(((0.25, 0.75), (0.25, 0.75))),)
    chj = chamber_region(j_complex(2), 0.25)
    assert set(b.intervals for b in chj.boxes) == {
        ((0.0, 0.0), (0.25, 0.75)),
        ((1.0, 1.0), (0.25, 0.75)),
        ((0.25, 0.75), (1.0, 1.0)),
    }
    center = chamber_region(full_cube(2), 0.5)
    assert center.boxes[0].intervals == ((0.5, 0.5), (0.5, 0.5))
    with pytest.raises(DomainError):
        chamber_region(full_cube(2), 0.0)


def test_chamber_contained_in_complex():
    for n in (1, 2, 3):
        K = j_complex(n)
        pts = region_grid(chamber_region(K, 0.2), 5)
        assert np.all(dist_to_complex(K, pts) <= 1e-12)


def test_j_delta_region_membership():
    r = j_delta_region(3, 0.2)
    assert not r.contains((0.5, 0.5, 0.0))
    assert r.contains((0.1, 0.5, 0.0))  # bottom collar
    assert r.contains((0.5, 0.95, 0.0))
    for p in complex_grid(j_complex(3), 5):
        assert r.contains(p)
    with pytest.raises(DomainError):
        j_delta_region(3, 0.5)


def test_face_projection():
    assert tuple(face_projection((0.3, 0.9), 2, 1)) == (0.3, 1.0)
    assert tuple(face_projection((0.0, 0.5), 1, 0)) == (0.0, 0.5)
    once = face_projection((0.4, 0.7), 1, 0)
    assert np.array_equal(face_projection(once, 1, 0), once)
    with pytest.raises(DomainError):
        face_projection((0.3, 0.9), 3, 1)


def test_face_projection_lipschitz():
    rng = np.random.default_rng(0)
    for _ in range(100):
        p, q = rng.uniform(size=2), rng.uniform(size=2)
        for j in (1, 2):
            for a in (0, 1):
                dp = np.max(np.abs(face_projection(p, j, a) - face_projection(q, j, a)))
                assert dp <= np.max(np.abs(p - q)) + 1e-15


def test_downward_closure_membership():
    for n in (2, 3):
        K = j_complex(n)
        for f in K.faces():
            for p in face_grid(f, 3):
                assert K.contains(p)


def test_j_union_bottom_equals_boundary():
    for n in (1, 2, 3):
        bottom = CubicalComplex(n, (Face(n, ((n, 0),)),))
        union = j_complex(n).union(bottom)
        res = 5 if n == 3 else 33
        pts = complex_grid(boundary_complex(n), res)
        assert np.all(dist_to_complex(union, pts) <= 1e-12)
        pts2 = complex_grid(union, res)
        assert np.all(dist_to_complex(boundary_complex(n), pts2) <= 1e-12)


def test_normalization_drops_dominated_faces():
    big = Face(2, ((1, 0),))
    small = Face(2, ((1, 0), (2, 1)))
    K = CubicalComplex(2, (small, big, big))
    assert K.maximal_faces == (big,)


def test_positive_faces_count():
    assert len(positive_faces(2)) == 5  # 4 edges + the square
    assert len(positive_faces(3)) == 19  # 12 edges + 6 squares + the cube


def test_intersect_complex_face():
    K = boundary_complex(2)
    got = intersect_complex_face(K, Face(2, ((2, 0),)))
    assert got.maximal_faces == (Face(2, ((2, 0),)),)
    empty = intersect_complex_face(
        CubicalComplex(2, (Face(2, ((1, 0),)),)), Face(2, ((1, 1),))
    )
    assert empty.is_empty


def test_subcomplex_relation():
    assert j_complex(2).is_subcomplex_of(boundary_complex(2))
    assert not boundary_complex(2).is_subcomplex_of(j_complex(2))


def test_region_validation():
    with pytest.raises(DomainError):
        Box(((0.5, 0.2),))
    r = BoxRegion((Box(((0.0, 1.0),)),))
    assert r.contains((0.5,)) and not r.contains((1.5,))


def test_chamber_containment_at_spec_resolution():
    for n in (1, 2, 3):
        K = j_complex(n)
        pts = region_grid(chamber_region(K, 0.2), 33 if n <= 2 else 17)
        assert np.all(dist_to_complex(K, pts) <= 1e-12)
    # full-resolution point-set identity between the two boundary builds
    for n in (1, 2, 3):
        bottom = CubicalComplex(n, (Face(n, ((n, 0),)),))
        union = j_complex(n).union(bottom)
        pts = complex_grid(boundary_complex(n), 33)
        assert np.all(dist_to_complex(union, pts) <= 1e-12)
