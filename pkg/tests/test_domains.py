import json

import numpy as np
import pytest

from dirmbo import (
    FieldSet,
    Labeling,
    SphereDomain,
    TorusDomain,
    labeling_distance,
    load_labels,
    periodic_extend,
    save_labels,
    weighted_inner,
)
from dirmbo.domains import labels_to_csv

from conftest import two_slab_labeling


class TestTorusDomain:
    def test_basic_properties(self):
        dom = TorusDomain(2, 8, 2.0)
        assert dom.shape == (8, 8)
        assert dom.npoints == 64
        assert dom.cell_volume == (2.0 / 8) ** 2
        assert dom.total_volume == 4.0

    def test_cell_volume_consistency(self):
        for d in (2, 3, 4):
            for n in (4, 8, 64):
                dom = TorusDomain(d, n, 2.0)
                assert dom.cell_volume * dom.npoints == pytest.approx(dom.total_volume, rel=1e-15)

    def test_axis_coords_node_centered(self):
        dom = TorusDomain(2, 4, 2.0)
        assert np.allclose(dom.axis_coords(), [-1.0, -0.5, 0.0, 0.5])

    @pytest.mark.parametrize("bad", [dict(d=1, n=8), dict(d=5, n=8), dict(d=2, n=3), dict(d=2, n=7), dict(d=2, n=8, length=0.0), dict(d=2, n=8, length=-1.0)])
    def test_rejects_invalid(self, bad):
        with pytest.raises(ValueError):
            TorusDomain(**bad)


class TestSphereDomain:
    def test_weights_sum_to_area(self):
        for n in (16, 64, 256):
            dom = SphereDomain(n, n)
            total = dom.quad_weights.sum() * dom.n_phi
            assert total == pytest.approx(4 * np.pi, rel=1e-10)

    def test_band_limit_constraints(self):
        dom = SphereDomain(64, 64)
        assert dom.lmax == 31  # capped by azimuth sampling
        assert dom.lmax <= dom.n_theta - 1
        assert dom.n_phi >= 2 * dom.lmax + 1
        with pytest.raises(ValueError):
            SphereDomain(16, 16, lmax=16)
        with pytest.raises(ValueError):
            SphereDomain(16, 16, lmax=10)  # n_phi < 2*lmax+1

    def test_theta_nodes_interior(self):
        dom = SphereDomain(32, 64)
        assert dom.theta_nodes.min() > 0
        assert dom.theta_nodes.max() < np.pi
        assert np.all(np.diff(dom.theta_nodes) > 0)

    def test_grid_vectors_unit(self):
        dom = SphereDomain(8, 16)
        v = dom.grid_vectors()
        assert np.allclose((v**2).sum(axis=0), 1.0)


class TestWeightedInner:
    def test_constant_field_gives_volume(self):
        dom = TorusDomain(2, 16, 2.0)
        one = np.ones(dom.shape)
        assert weighted_inner(dom, one, one) == pytest.approx(4.0, rel=1e-14)

    def test_constant_on_sphere_gives_area(self):
        dom = SphereDomain(32, 64)
        one = np.ones(dom.shape)
        assert weighted_inner(dom, one, one) == pytest.approx(4 * np.pi, rel=1e-10)

    def test_cosine_mode_integrates_exactly(self):
        # integral of cos(pi x)^2 over [-1, 1]^2 is 2; trapezoid on a periodic
        # grid is exact for this mode
        dom = TorusDomain(2, 64, 2.0)
        f = np.cos(np.pi * dom.axis_coords())[:, None] * np.ones(64)
        assert weighted_inner(dom, f, f) == pytest.approx(2.0, rel=1e-12)

    def test_symmetric_and_bilinear(self):
        dom = TorusDomain(2, 8)
        rng = np.random.default_rng(0)
        a, b, c = rng.normal(size=(3,) + dom.shape)
        assert weighted_inner(dom, a, b) == pytest.approx(weighted_inner(dom, b, a), rel=1e-14)
        lhs = weighted_inner(dom, a, 2.5 * b + c)
        rhs = 2.5 * weighted_inner(dom, a, b) + weighted_inner(dom, a, c)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_positive_definite(self):
        dom = TorusDomain(2, 8)
        rng = np.random.default_rng(1)
        for _ in range(5):
            f = rng.normal(size=dom.shape)
            assert weighted_inner(dom, f, f) > 0
        assert weighted_inner(dom, np.zeros(dom.shape), np.zeros(dom.shape)) == 0.0

    def test_shape_mismatch_rejected(self):
        dom = TorusDomain(2, 8)
        with pytest.raises(ValueError):
            weighted_inner(dom, np.ones((4, 4)), np.ones((4, 4)))


class TestLabelingDistance:
    def test_identity_zero(self):
        lab = two_slab_labeling(8)
        assert labeling_distance(lab, lab) == 0

    def test_all_points_differ(self):
        dom = TorusDomain(2, 8)
        a = Labeling(dom, np.zeros((8, 8)), 2)
        b = Labeling(dom, np.ones((8, 8)), 2)
        assert labeling_distance(a, b) == 64

    def test_single_flip(self):
        dom = TorusDomain(2, 8)
        a = Labeling(dom, np.zeros((8, 8)), 2)
        flipped = np.zeros((8, 8))
        flipped[3, 5] = 1
        b = Labeling(dom, flipped, 2)
        assert labeling_distance(a, b) == 1

    def test_metric_axioms_on_random_labelings(self):
        dom = TorusDomain(2, 8)
        rng = np.random.default_rng(7)
        for _ in range(20):
            x, y, z = (Labeling(dom, rng.integers(0, 3, dom.shape), 3) for _ in range(3))
            dxy = labeling_distance(x, y)
            assert dxy >= 0
            assert dxy == labeling_distance(y, x)
            assert dxy <= labeling_distance(x, z) + labeling_distance(z, y)

    def test_incomparable_rejected(self):
        a = two_slab_labeling(8)
        b = two_slab_labeling(16)
        with pytest.raises(ValueError):
            labeling_distance(a, b)


class TestPeriodicExtend:
    def test_m1_identity(self):
        lab = two_slab_labeling(8)
        out = periodic_extend(lab, 1)
        assert np.array_equal(out.labels, lab.labels)

    def test_tiling_index_property(self):
        lab = two_slab_labeling(8)
        out = periodic_extend(lab, 2)
        n = 8
        for i in (0, 3, 7):
            for j in (1, 5):
                assert out.labels[i + n, j] == lab.labels[i, j]
                assert out.labels[i, j + n] == lab.labels[i, j]

    def test_two_slabs_tile_to_four(self):
        lab = two_slab_labeling(8)
        out = periodic_extend(lab, 2)
        # along axis 0 the pattern is 0-block, 1-block, 0-block, 1-block
        col = out.labels[:, 0]
        assert np.array_equal(col, np.repeat([0, 1, 0, 1], 4))

    def test_restriction_recovers_original(self):
        lab = two_slab_labeling(8)
        out = periodic_extend(lab, 3)
        assert np.array_equal(out.labels[:8, :8], lab.labels)
        assert out.domain.n == 24 and out.domain.length == 6.0

    def test_sphere_rejected(self):
        dom = SphereDomain(8, 16)
        lab = Labeling(dom, np.zeros(dom.shape), 2)
        with pytest.raises(ValueError):
            periodic_extend(lab, 2)


class TestLabelIO:
    def test_roundtrip_bytes_identical(self, tmp_path):
        lab = two_slab_labeling(16)
        p1 = tmp_path / "labels.bin"
        save_labels(lab, p1)
        loaded = load_labels(p1)
        assert loaded == lab
        p2 = tmp_path / "again.bin"
        save_labels(loaded, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_sphere_roundtrip(self, tmp_path):
        dom = SphereDomain(8, 16)
        rng = np.random.default_rng(0)
        lab = Labeling(dom, rng.integers(0, 3, dom.shape), 3)
        save_labels(lab, tmp_path / "s.bin")
        assert load_labels(tmp_path / "s.bin") == lab

    def test_size_mismatch_detected(self, tmp_path):
        lab = two_slab_labeling(8)
        save_labels(lab, tmp_path / "l.bin")
        (tmp_path / "l.bin").write_bytes(b"\x00" * 10)
        with pytest.raises(ValueError):
            load_labels(tmp_path / "l.bin")

    def test_bad_sidecar_detected(self, tmp_path):
        lab = two_slab_labeling(8)
        save_labels(lab, tmp_path / "l.bin")
        meta = json.loads((tmp_path / "l.json").read_text())
        meta["domain_kind"] = "klein-bottle"
        (tmp_path / "l.json").write_text(json.dumps(meta))
        with pytest.raises(ValueError):
            load_labels(tmp_path / "l.bin")

    def test_csv_export(self, tmp_path):
        lab = two_slab_labeling(4)
        labels_to_csv(lab, tmp_path / "l.csv")
        lines = (tmp_path / "l.csv").read_text().strip().splitlines()
        assert lines[0] == "x1,x2,label"
        assert len(lines) == 1 + 16
        first = lines[1].split(",")
        assert float(first[0]) == -1.0 and float(first[1]) == -1.0 and first[2] == "0"


class TestContainers:
    def test_fieldset_validation(self):
        dom = TorusDomain(2, 8)
        with pytest.raises(ValueError):
            FieldSet(dom, np.ones((1,) + dom.shape))  # k < 2
        with pytest.raises(ValueError):
            FieldSet(dom, np.ones((2, 4, 4)))
        bad = np.ones((2,) + dom.shape)
        bad[0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            FieldSet(dom, bad)

    def test_labeling_validation(self):
        dom = TorusDomain(2, 8)
        with pytest.raises(ValueError):
            Labeling(dom, np.full(dom.shape, 5), 3)
        with pytest.raises(ValueError):
            Labeling(dom, np.zeros((4, 4)), 2)
