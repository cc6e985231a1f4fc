from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vesselkit.anomaly import (
    cluster_indices,
    detect,
    extract_extremums,
    flag_and_grade,
)
from vesselkit.errors import SegmentTooShortError
from vesselkit.metrics import DistanceField, ThicknessProfile
from vesselkit.phantoms import aneurysm_bar, bar_mask, stenosis_bar
from vesselkit.raster import BinaryMask, PipelineConfig
from vesselkit.skeleton import VesselSegment

from .conftest import union_find_clusters

CFG = PipelineConfig()


def _row_fixture(values: list[float]):
    """A horizontal segment whose distance-field reads equal the profile."""
    seg = VesselSegment(0, tuple((i, 0) for i in range(len(values))))
    profile = ThicknessProfile(0, tuple(float(v) for v in values))
    field = DistanceField(np.array([values], dtype=np.float64))
    return seg, profile, field


class TestClusterIndices:
    def test_gap_example(self):
        assert cluster_indices([40, 44, 90], eps=5.0) == [[40, 44], [90]]

    def test_all_within_eps_is_one_cluster(self):
        assert cluster_indices([7, 9, 11, 13], eps=2.0) == [[7, 9, 11, 13]]

    def test_empty(self):
        assert cluster_indices([], eps=3.0) == []

    def test_input_order_does_not_matter(self):
        assert cluster_indices([90, 44, 40], eps=5.0) == [[40, 44], [90]]

    @given(
        st.lists(st.integers(0, 500), min_size=1, max_size=40),
        st.floats(min_value=0.5, max_value=30.0),
    )
    def test_matches_union_find_oracle(self, indices, eps):
        got = sorted(cluster_indices(indices, eps), key=lambda c: c[0])
        want = union_find_clusters(indices, eps)
        assert got == want

    @given(
        st.lists(st.integers(0, 500), min_size=1, max_size=40),
        st.floats(min_value=0.5, max_value=30.0),
    )
    def test_is_a_partition_with_eps_gaps(self, indices, eps):
        clusters = cluster_indices(indices, eps)
        flat = [i for c in clusters for i in c]
        assert flat == sorted(indices)
        for c in clusters:
            assert all(b - a <= eps for a, b in zip(c, c[1:]))
        for prev, nxt in zip(clusters, clusters[1:]):
            assert nxt[0] - prev[-1] > eps


class TestExtractExtremums:
    def test_single_dip_survives(self):
        _, profile, _ = _row_fixture([5, 5, 5, 2, 5, 5, 5, 5, 5, 5])
        out = extract_extremums(profile, CFG)
        assert len(out) == 1
        assert (out[0].index, out[0].value, out[0].kind) == (3, 2.0, "min")

    def test_plateau_collapses_to_center(self):
        values = [5.0] * 12
        values[5] = values[6] = values[7] = 2.0
        _, profile, _ = _row_fixture(values)
        out = extract_extremums(profile, CFG)
        assert [(e.index, e.kind) for e in out] == [(6, "min")]

    def test_boundary_plateau_is_not_an_extremum(self):
        _, profile, _ = _row_fixture([5, 5, 5, 5, 5, 5, 5, 5, 2, 2])
        assert extract_extremums(profile, CFG) == []

    def test_monotone_profile_has_no_extremums(self):
        _, profile, _ = _row_fixture(list(range(10, 40)))
        assert extract_extremums(profile, CFG) == []

    def test_cluster_center_takes_kind_of_nearest_raw(self):
        # raws at 12 (min), 14 (max), 15 (min) cluster under eps = 3; the
        # integer center int(41/3) = 13 is a plain slope pixel, and the
        # distance tie between raws 12 and 14 resolves to the lower index
        values = [6.0] * 30
        values[12] = 3.0
        values[13] = 4.0
        values[14] = 7.0
        values[15] = 2.0
        _, profile, _ = _row_fixture(values)
        out = extract_extremums(profile, CFG)
        assert len(out) == 1
        assert out[0].index == 13
        assert out[0].value == 4.0  # value read at the center index
        assert out[0].kind == "min"

    def test_bilateral_filter_with_three_centers(self):
        values = [6.0] * 50
        values[10] = 4.0
        values[25] = 9.0
        values[40] = 4.0
        _, profile, _ = _row_fixture(values)
        out = extract_extremums(profile, CFG)
        assert [(e.index, e.kind) for e in out] == [(25, "max")]

    def test_short_profile_raises(self):
        _, profile, _ = _row_fixture([5.0] * 9)
        with pytest.raises(SegmentTooShortError):
            extract_extremums(profile, CFG)


class TestFlagAndGrade:
    def test_stenosis_sign_and_value(self):
        seg, profile, field = _row_fixture([5, 5, 5, 2, 5, 5, 5, 5, 5, 5])
        ext = extract_extremums(profile, CFG)
        out = flag_and_grade(seg, profile, field, ext, CFG)
        assert len(out) == 1
        f = out[0]
        assert f.kind == "stenosis"
        assert f.change_p == pytest.approx(-0.6)
        assert (f.x, f.y, f.index) == (3, 0, 3)
        assert f.reference_radius == pytest.approx(5.0)

    def test_aneurysm_sign(self):
        seg, profile, field = _row_fixture([5, 5, 5, 9, 5, 5, 5, 5, 5, 5])
        ext = extract_extremums(profile, CFG)
        out = flag_and_grade(seg, profile, field, ext, CFG)
        assert [f.kind for f in out] == ["aneurysm"]
        assert out[0].change_p == pytest.approx(0.8)

    def test_below_threshold_not_flagged(self):
        # 6 vs flank 5: |6-5|/5 = 0.2, under the 0.5 gate
        seg, profile, field = _row_fixture([5, 5, 5, 6, 5, 5, 5, 5, 5, 5])
        ext = extract_extremums(profile, CFG)
        assert flag_and_grade(seg, profile, field, ext, CFG) == []

    def test_exactly_at_threshold_not_flagged(self):
        # the gate is strict: deviation must exceed minChangeThreshold
        seg, profile, field = _row_fixture([6, 6, 6, 3, 6, 6, 6, 6, 6, 6])
        ext = extract_extremums(profile, CFG)
        assert ext  # it is an extremum, just not severe enough
        assert flag_and_grade(seg, profile, field, ext, CFG) == []

    def test_scale_invariance_of_change_p(self):
        base = [5, 5, 5, 2, 5, 5, 5, 5, 5, 5]
        seg, profile, field = _row_fixture(base)
        f0 = flag_and_grade(seg, profile, field,
                            extract_extremums(profile, CFG), CFG)[0]
        k = 3.7
        seg2, profile2, field2 = _row_fixture([v * k for v in base])
        f1 = flag_and_grade(seg2, profile2, field2,
                            extract_extremums(profile2, CFG), CFG)[0]
        assert f1.change_p == pytest.approx(f0.change_p)
        assert f1.kind == f0.kind

    def test_flanks_clamp_at_profile_ends(self):
        # extremum at index 1: the left flank index clamps to 0
        seg, profile, field = _row_fixture([5, 2, 5, 5, 5, 5, 5, 5, 5, 5])
        ext = extract_extremums(profile, CFG)
        out = flag_and_grade(seg, profile, field, ext, CFG)
        assert len(out) == 1 and out[0].index == 1

    def test_zero_flank_skipped(self, caplog):
        seg, profile, field = _row_fixture([0, 0, 0, 2, 0, 0, 0, 0, 0, 0])
        ext = [e for e in extract_extremums(profile, CFG)]
        with caplog.at_level("WARNING"):
            out = flag_and_grade(seg, profile, field, ext, CFG)
        assert out == []

    def test_wire_dict(self):
        seg, profile, field = _row_fixture([5, 5, 5, 2, 5, 5, 5, 5, 5, 5])
        f = flag_and_grade(seg, profile, field,
                           extract_extremums(profile, CFG), CFG)[0]
        d = f.to_dict()
        assert set(d) == {"segment", "x", "y", "index", "kind",
                          "change_p", "reference_radius_px"}


class TestDetect:
    def test_empty_mask(self):
        assert detect(BinaryMask(np.zeros((10, 10), dtype=bool)), CFG) == []

    def test_constant_bar_is_clean(self):
        assert detect(bar_mask(), CFG) == []

    def test_stenosis_bar(self):
        out = detect(stenosis_bar(), CFG)
        assert [f.kind for f in out] == ["stenosis"]
        assert out[0].change_p == pytest.approx(-0.6, abs=0.1)

    def test_aneurysm_bar(self):
        out = detect(aneurysm_bar(), CFG)
        assert [f.kind for f in out] == ["aneurysm"]
        assert out[0].change_p == pytest.approx(0.8, abs=0.15)

    def test_deterministic(self):
        a = detect(stenosis_bar(), CFG)
        b = detect(stenosis_bar(), CFG)
        assert [f.to_dict() for f in a] == [f.to_dict() for f in b]
