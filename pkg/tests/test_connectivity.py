"""Component labeling, seed detection, region growth, refinement, and
screening statistics."""

import numpy as np
import pytest

from mattekit import (
    AlphaMatte,
    EmptyForegroundError,
    InvalidSeedError,
    ScreeningStats,
    ScreeningThresholds,
    auto_screen,
    background_regions,
    connected_components,
    edge_seed_points,
    grow_semitransparent,
    invert_alpha,
    refine,
    screening_stats,
)
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from mattekit.connectivity import SeedSet, _dilate8

from conftest import hand_fixture, noisy_pair, random_valid_matte
from oracles import canonical_labels, reference_refine, uf_label


def matte(arr):
    return AlphaMatte(np.asarray(arr, dtype=np.uint8))


class TestConnectedComponents:
    def test_empty_mask(self):
        rs = connected_components(np.zeros((5, 5), dtype=bool), 4)
        assert rs.region_count == 0
        assert not rs.label_map.any()

    def test_diagonal_pixels_split_by_connectivity(self):
        m = np.zeros((4, 4), dtype=bool)
        m[1, 1] = m[2, 2] = True
        assert connected_components(m, 8).region_count == 1
        assert connected_components(m, 4).region_count == 2

    def test_region_sizes_sum_to_labeled_pixels(self, rng):
        m = rng.random((12, 12)) < 0.5
        rs = connected_components(m, 4)
        assert sum(rs.region_sizes) == int(m.sum())
        assert (rs.label_map > 0).sum() == int(m.sum())

    @pytest.mark.parametrize("connectivity", [4, 8])
    def test_matches_union_find_oracle(self, connectivity, rng):
        for _ in range(500):
            m = rng.random((16, 16)) < rng.uniform(0.2, 0.8)
            ours = connected_components(m, connectivity)
            theirs = uf_label(m, connectivity)
            assert np.array_equal(canonical_labels(ours.label_map), theirs)

    @given(
        hnp.arrays(np.bool_, hnp.array_shapes(min_dims=2, max_dims=2,
                                              min_side=1, max_side=12)),
        st.sampled_from([4, 8]),
    )
    @settings(max_examples=60, deadline=None)
    def test_labeling_properties(self, m, connectivity):
        rs = connected_components(m, connectivity)
        assert np.array_equal(rs.label_map > 0, m)
        assert rs.label_map.max(initial=0) == rs.region_count
        assert sum(rs.region_sizes) == int(m.sum())
        assert np.array_equal(canonical_labels(rs.label_map), uf_label(m, connectivity))

    def test_accepts_inverse_alpha_and_uint8(self):
        a = matte([[0, 128, 255], [0, 128, 0]])
        inv = invert_alpha(a)
        from_inv = connected_components(inv, 4)
        from_arr = connected_components(inv.values, 4)
        assert np.array_equal(from_inv.label_map, from_arr.label_map)

    def test_rejects_bad_connectivity(self):
        with pytest.raises(ValueError):
            connected_components(np.zeros((2, 2), dtype=bool), 6)


class TestBackgroundRegions:
    def test_all_opaque_has_no_regions(self):
        assert background_regions(matte(np.full((4, 4), 255))).region_count == 0

    def test_vertical_split(self):
        v = np.zeros((4, 6), dtype=np.uint8)
        v[:, 3:] = 255
        rs = background_regions(matte(v))
        assert rs.region_count == 1
        assert rs.region_sizes == (12,)
        assert (rs.label_map[:, :3] == 1).all()

    def test_enclosed_hole_is_second_region(self):
        v = np.zeros((7, 7), dtype=np.uint8)
        v[1:6, 1:6] = 255
        v[3, 3] = 0
        rs = background_regions(matte(v))
        assert rs.region_count == 2
        assert np.array_equal(
            canonical_labels(rs.label_map), uf_label(v == 0, 4)
        )


class TestEdgeSeedPoints:
    def test_no_semi_pixels_no_seeds(self):
        a = matte(np.full((4, 4), 255))
        assert len(edge_seed_points(invert_alpha(a), background_regions(a))) == 0

    def test_band_between_background_and_foreground(self):
        # col 0 background, col 1 semi band, cols 2+ opaque
        v = np.zeros((6, 6), dtype=np.uint8)
        v[:, 1] = 100
        v[:, 2:] = 255
        a = matte(v)
        seeds = edge_seed_points(invert_alpha(a), background_regions(a))
        assert set(seeds.points) == {(r, 1) for r in range(6)}

    def test_interior_blob_contributes_no_seeds(self):
        v = np.zeros((6, 6), dtype=np.uint8)
        v[:, 1] = 100
        v[:, 2:] = 255
        v[3, 4] = 77  # fully inside the opaque zone
        a = matte(v)
        seeds = edge_seed_points(invert_alpha(a), background_regions(a))
        assert (3, 4) not in set(seeds.points)
        assert set(seeds.points) == {(r, 1) for r in range(6)}

    def test_oracle_exhaustive_adjacency(self, rng):
        for _ in range(25):
            a = random_valid_matte(rng)
            inv = invert_alpha(a)
            bg = background_regions(a)
            seeds = edge_seed_points(inv, bg)
            v = a.values
            h, w = v.shape
            expected = set()
            for r in range(h):
                for c in range(w):
                    if not inv.values[r, c]:
                        continue
                    for dr in (-1, 0, 1):
                        for dc in (-1, 0, 1):
                            rr, cc = r + dr, c + dc
                            if (dr or dc) and 0 <= rr < h and 0 <= cc < w \
                                    and v[rr, cc] == 0:
                                expected.add((r, c))
            assert set(seeds.points) == expected


class TestGrowSemitransparent:
    def test_empty_seed_set(self):
        a = matte([[0, 128, 255]])
        grown = grow_semitransparent(invert_alpha(a), SeedSet(()))
        assert grown.region_count == 0

    def test_single_seed_floods_component(self):
        v = np.zeros((5, 5), dtype=np.uint8)
        band = [(0, 2), (1, 2), (2, 2), (3, 2), (4, 2)]
        for r, c in band:
            v[r, c] = 100
        grown = grow_semitransparent(
            invert_alpha(matte(v)), SeedSet(((2, 2),))
        )
        assert grown.region_count == 1
        assert grown.region_sizes == (5,)
        assert {(r, c) for r, c in np.argwhere(grown.label_map)} == set(band)

    def test_unseeded_component_stays_out(self):
        v = np.zeros((5, 7), dtype=np.uint8)
        v[:, 1] = 100  # component A
        v[:, 5] = 100  # component B
        grown = grow_semitransparent(invert_alpha(matte(v)), SeedSet(((0, 1),)))
        assert grown.region_count == 1
        assert (grown.label_map[:, 5] == 0).all()
        assert (grown.label_map[:, 1] == 1).all()

    def test_seed_off_band_rejected(self):
        a = matte([[0, 128, 255]])
        with pytest.raises(InvalidSeedError):
            grow_semitransparent(invert_alpha(a), SeedSet(((0, 0),)))

    def test_duplicate_seeds_rejected(self):
        with pytest.raises(ValueError):
            SeedSet(((0, 0), (0, 0)))


class TestRefine:
    def test_clean_matte_is_fixed_point(self, rng):
        for _ in range(10):
            _, clean = noisy_pair(rng)
            assert refine(clean) == clean

    def test_hand_fixture_exact(self):
        noisy, expected = hand_fixture()
        out = refine(noisy)
        assert out.values[2, 0] == 0
        assert out.values[4, 4] == 255
        assert (out.values[:, 2] == 128).all()
        assert out == expected

    def test_detached_opaque_blob_zeroed(self):
        v = np.zeros((8, 8), dtype=np.uint8)
        v[1:4, 4:8] = 255  # subject
        v[6, 1] = 255  # floating island
        out = refine(matte(v))
        assert out.values[6, 1] == 0
        assert (out.values[1:4, 4:8] == 255).all()

    def test_all_zero_raises(self):
        with pytest.raises(EmptyForegroundError):
            refine(matte(np.zeros((4, 4))))

    def test_matches_reference_on_random_mattes(self, rng):
        for _ in range(40):
            a = random_valid_matte(rng)
            assert np.array_equal(refine(a).values, reference_refine(a.values))

    def test_idempotent_and_single_component(self, rng):
        for _ in range(60):
            a = random_valid_matte(rng)
            once = refine(a)
            assert refine(once) == once
            comps = connected_components(once.values > 0, 4)
            assert comps.region_count == 1

    @given(
        hnp.arrays(np.uint8, hnp.array_shapes(min_dims=2, max_dims=2,
                                              min_side=1, max_side=14))
    )
    @settings(max_examples=80, deadline=None)
    def test_idempotence_property(self, values):
        if not values.any():
            values = values.copy()
            values[0, 0] = 255
        once = refine(AlphaMatte(values))
        assert refine(once) == once
        assert connected_components(once.values > 0, 4).region_count == 1

    def test_changed_pixels_characterization(self, rng):
        # a changed pixel either got promoted to 255 (it was unseeded
        # semi) or zeroed (it was nonzero, outside the kept component);
        # surviving semi values are bit-exact copies of the input
        for _ in range(20):
            a = random_valid_matte(rng)
            out = refine(a)
            changed = out.values != a.values
            was_semi = (a.values != 0) & (a.values != 255)
            promoted = changed & (out.values == 255)
            zeroed = changed & (out.values == 0)
            assert (promoted | zeroed)[changed].all()
            assert was_semi[promoted].all()
            assert (a.values[zeroed] > 0).all()
            still_semi = (out.values != 0) & (out.values != 255)
            assert (out.values[still_semi] == a.values[still_semi]).all()

    def test_refined_semi_regions_touch_background(self, rng):
        for _ in range(20):
            a = random_valid_matte(rng)
            out = refine(a)
            inv = invert_alpha(out)
            if not inv.values.any():
                continue
            comps = connected_components(inv, 8)
            near_zero = _dilate8(out.values == 0)
            touching = set(np.unique(comps.label_map[near_zero]).tolist())
            for lbl in range(1, comps.region_count + 1):
                assert lbl in touching


class TestScreeningStats:
    def test_binary_matte_all_zero_stats(self):
        v = np.zeros((6, 6), dtype=np.uint8)
        v[2:4, 2:4] = 255
        s = screening_stats(matte(v))
        assert s == ScreeningStats(0.0, 0.0, 0.0)

    def test_hand_fixture_removed_fraction(self):
        noisy, _ = hand_fixture()
        s = screening_stats(noisy)
        assert s.removed_fraction == pytest.approx(2 / 8)
        assert s.semi_fraction == pytest.approx(8 / 36)
        # the floating 64 at (2,0) is bg-seeded semi with no foreground contact
        assert s.attached_noise_fraction == pytest.approx(1 / 8)

    def test_clean_edge_band_nothing_removed(self, rng):
        _, clean = noisy_pair(rng)
        s = screening_stats(clean)
        assert s.removed_fraction == 0.0
        assert s.attached_noise_fraction == 0.0

    def test_all_zero_matte_ok(self):
        assert screening_stats(matte(np.zeros((4, 4)))) == ScreeningStats(0.0, 0.0, 0.0)


class TestAutoScreen:
    def test_zero_stats_pass(self):
        assert auto_screen(ScreeningStats(0, 0, 0), ScreeningThresholds()) == "pass"

    def test_removed_over_threshold_flags(self):
        stats = ScreeningStats(0.1, 0.0, 0.5)
        assert auto_screen(stats, ScreeningThresholds(removed_fraction=0.3)) == "flag"

    def test_boundary_equality_passes(self):
        t = ScreeningThresholds(0.25, 0.05, 0.30)
        assert auto_screen(ScreeningStats(0.25, 0.05, 0.30), t) == "pass"

    def test_semi_fraction_over_threshold_flags(self):
        assert auto_screen(
            ScreeningStats(0.6, 0.0, 0.0), ScreeningThresholds(semi_fraction=0.25)
        ) == "flag"
