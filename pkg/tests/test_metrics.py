import numpy as np
import pytest

from elastiseg import MetricsError, ScalarField, count_components, dice, evaluate_pair, hd95, make_field
from elastiseg.metrics import boundary_voxels


def oracle_hd95(a: np.ndarray, b: np.ndarray, spacing) -> float:
    """All-pairs O(n^2) reference, independent of the KD-tree path."""
    sp = np.asarray(spacing, dtype=np.float64)
    pa = np.argwhere(boundary_voxels(a)) * sp
    pb = np.argwhere(boundary_voxels(b)) * sp
    d = np.sqrt(((pa[:, None, :] - pb[None, :, :]) ** 2).sum(-1))
    pooled = np.concatenate([d.min(axis=1), d.min(axis=0)])
    return float(np.percentile(pooled, 95.0))


def binfield(a, spacing=1.0):
    return ScalarField(np.asarray(a, dtype=np.float64), spacing)


def test_dice_examples():
    m = np.zeros((4, 4))
    m[1:3, 1:3] = 1.0
    f = binfield(m)
    assert dice(f, f) == 1.0
    other = np.zeros((4, 4))
    other[0, 0] = 1.0
    assert dice(f, binfield(other)) == 0.0
    a = binfield(np.array([[1.0, 1.0], [0.0, 0.0]]))
    b = binfield(np.array([[1.0, 0.0], [1.0, 0.0]]))
    assert dice(a, b) == 0.5


def test_dice_empty_convention_and_validation():
    empty = make_field((3, 3), 1.0, 0.0)
    assert dice(empty, empty) == 1.0
    with pytest.raises(MetricsError):
        dice(make_field((3, 3), 1.0, 0.5), empty)


def test_hd95_identical_masks_is_zero():
    m = np.zeros((6, 6))
    m[2:5, 1:4] = 1.0
    f = binfield(m)
    assert hd95(f, f) == 0.0


def test_hd95_single_pixel_offset():
    a = np.zeros((8, 8))
    a[0, 0] = 1.0
    b = np.zeros((8, 8))
    b[3, 4] = 1.0
    assert hd95(binfield(a), binfield(b)) == 5.0


def test_hd95_empty_mask_raises():
    m = np.zeros((4, 4))
    m[1, 1] = 1.0
    with pytest.raises(MetricsError):
        hd95(binfield(m), make_field((4, 4), 1.0, 0.0))
    with pytest.raises(MetricsError):
        hd95(make_field((4, 4), 1.0, 0.0), binfield(m))


def test_hd95_matches_bruteforce_oracle_exactly():
    rng = np.random.default_rng(30)
    checked = 0
    while checked < 200:
        if checked % 3 == 2:
            shape = tuple(rng.integers(3, 11, size=3))
        else:
            shape = tuple(rng.integers(3, 33, size=2))
        a = (rng.random(shape) < rng.uniform(0.1, 0.6)).astype(float)
        b = (rng.random(shape) < rng.uniform(0.1, 0.6)).astype(float)
        if not a.any() or not b.any():
            continue
        spacing = tuple(float(s) for s in rng.choice([0.5, 1.0, 2.0, 3.0], size=len(shape)))
        got = hd95(binfield(a, spacing), binfield(b, spacing))
        assert got == oracle_hd95(a != 0, b != 0, spacing)
        checked += 1


def test_hd95_symmetry_and_bounds():
    rng = np.random.default_rng(31)
    for _ in range(20):
        a = (rng.random((12, 12)) < 0.3).astype(float)
        b = (rng.random((12, 12)) < 0.3).astype(float)
        if not a.any() or not b.any():
            continue
        fa, fb = binfield(a), binfield(b)
        assert hd95(fa, fb) == hd95(fb, fa)
        assert hd95(fa, fb) >= 0.0


def test_translation_invariance():
    a = np.zeros((16, 16))
    a[4:7, 5:9] = 1.0
    b = np.zeros((16, 16))
    b[5:9, 4:7] = 1.0
    shift = (3, 2)
    a2 = np.roll(a, shift, axis=(0, 1))
    b2 = np.roll(b, shift, axis=(0, 1))
    assert dice(binfield(a), binfield(b)) == dice(binfield(a2), binfield(b2))
    assert hd95(binfield(a), binfield(b)) == hd95(binfield(a2), binfield(b2))


def test_boundary_uses_face_adjacency_and_grid_border():
    m = np.ones((4, 4))
    # every voxel of a full mask touches out-of-bounds except the 2x2 interior
    edge = boundary_voxels(m != 0)
    assert edge.sum() == 12
    assert not edge[1:3, 1:3].any()
    hollow = np.zeros((5, 5))
    hollow[1:4, 1:4] = 1.0
    hollow[2, 2] = 0.0
    edge = boundary_voxels(hollow != 0)
    assert edge.sum() == 8  # the ring: all foreground voxels touch the hole or outside


def test_count_components():
    assert count_components(make_field((5, 5), 1.0, 0.0)) == 0
    assert count_components(make_field((5, 5), 1.0, 1.0)) == 1
    m = np.zeros((7, 7))
    m[0, 0] = 1.0
    m[3, 3] = 1.0
    m[6, 6] = 1.0
    assert count_components(binfield(m)) == 3
    diag = np.eye(5)
    assert count_components(binfield(diag), "face") == 5
    assert count_components(binfield(diag), "full") == 1
    with pytest.raises(MetricsError):
        count_components(binfield(diag), "weird")


def test_count_components_3d_face():
    m = np.zeros((4, 4, 4))
    m[0, 0, 0] = 1.0
    m[0, 1, 1] = 1.0  # diagonal in-plane: separate under 6-connectivity
    assert count_components(binfield(m), "face") == 2
    assert count_components(binfield(m), "full") == 1


def test_evaluate_pair():
    gt = np.zeros((8, 8))
    gt[2:6, 2:6] = 1.0
    pred = gt.copy()
    pred[7, 7] = 1.0
    rep = evaluate_pair(binfield(pred), binfield(gt))
    assert 0.9 < rep.dice < 1.0
    assert rep.components_pred == 2
    assert rep.components_gt == 1
    assert rep.hd95 >= 0.0
