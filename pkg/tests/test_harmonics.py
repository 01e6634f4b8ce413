import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polyinv.errors import InputError
from polyinv.harmonics import (
    HarmonicExpansion,
    cylindrical_evaluate,
    cylindrical_fit,
    cylindrical_invariants,
    fibonacci_sphere,
    harmonic_keys,
    spherical_basis,
    spherical_design,
    spherical_evaluate,
    spherical_fit,
    spherical_invariants,
)
from polyinv.tensor_poly import random_orthogonal

GRID64 = 2 * np.pi * np.arange(64) / 64


def random_expansion(kind, max_l, rng):
    keys = harmonic_keys(kind, max_l)
    return HarmonicExpansion(kind, max_l, dict(zip(keys, rng.standard_normal(len(keys)))))


class TestCylindrical:
    def test_cosine_three(self):
        h = cylindrical_fit(GRID64, 2 + np.cos(3 * GRID64), 4)
        expected = {(0, 0): 2.0, (3, 1): 1.0}
        for key, value in h.coeffs.items():
            assert abs(value - expected.get(key, 0.0)) < 1e-10

    def test_constant(self):
        h = cylindrical_fit(GRID64, np.full(64, 5.0), 3)
        assert abs(h.coeffs[(0, 0)] - 5) < 1e-12
        assert max(abs(v) for k, v in h.coeffs.items() if k != (0, 0)) < 1e-12

    @given(st.integers(0, 2**31), st.integers(1, 6))
    def test_round_trip(self, seed, max_l):
        rng = np.random.default_rng(seed)
        h = random_expansion("cylindrical", max_l, rng)
        phi = rng.uniform(0, 2 * np.pi, 4 * max_l + 8)
        back = cylindrical_fit(phi, cylindrical_evaluate(h, phi), max_l)
        np.testing.assert_allclose(back.vector(), h.vector(), rtol=1e-9, atol=1e-9 * np.abs(h.vector()).max())

    def test_invariants(self):
        h = HarmonicExpansion("cylindrical", 3, {(3, 1): 1.0})
        assert cylindrical_invariants(h).tolist() == [0.0, 0.0, 0.0, 1.0]
        h = HarmonicExpansion("cylindrical", 2, {(0, 0): 3.0, (2, 1): 1.0, (2, -1): 2.0})
        assert cylindrical_invariants(h).tolist() == [9.0, 0.0, 5.0]
        assert not np.any(cylindrical_invariants(HarmonicExpansion("cylindrical", 4, {})))

    @given(st.integers(0, 2**31))
    def test_invariants_under_angle_shift(self, seed):
        rng = np.random.default_rng(seed)
        h = random_expansion("cylindrical", 4, rng)
        shift = rng.uniform(0, 2 * np.pi)
        # r(phi) sampled in a frame turned by shift
        moved = cylindrical_fit(GRID64, cylindrical_evaluate(h, GRID64 + shift), 4)
        np.testing.assert_allclose(cylindrical_invariants(moved), cylindrical_invariants(h), rtol=1e-9, atol=1e-12)

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            cylindrical_fit(GRID64[:6], np.ones(6), 3)


class TestSphericalBasis:
    def test_constant(self, rng):
        for d in rng.standard_normal((5, 3)):
            assert abs(spherical_basis(0, 0, d) - 1 / math.sqrt(4 * math.pi)) < 1e-14

    def test_z_axis_maximum(self):
        dirs = fibonacci_sphere(2000)
        assert spherical_basis(1, 0, [0, 0, 1]) >= spherical_basis(1, 0, dirs).max()

    def test_direction_rescaled(self):
        assert abs(spherical_basis(2, 1, [3.0, 0, 3.0]) - spherical_basis(2, 1, [1.0, 0, 1.0])) < 1e-15

    def test_gram_midpoint_grid(self):
        # Gauss-Legendre nodes in theta itself (weight sin theta), unlike the
        # cos(theta) nodes used for normalization; a midpoint rule at 50 nodes
        # carries its own ~1e-3 error
        nt, nph = 50, 100
        u, wu = np.polynomial.legendre.leggauss(nt)
        theta, wt = (u + 1) * np.pi / 2, wu * np.pi / 2
        phi = (np.arange(nph) + 0.5) * 2 * np.pi / nph
        t, p = np.meshgrid(theta, phi, indexing="ij")
        dirs = np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=-1).reshape(-1, 3)
        w = (np.sin(t) * wt[:, None] * (2 * np.pi / nph)).reshape(-1)
        y = spherical_design(dirs, 3)
        gram = y.T @ (w[:, None] * y)
        assert np.abs(gram - np.eye(16)).max() < 1e-3

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            spherical_basis(4, 0, [0, 0, 1])
        with pytest.raises(ValueError):
            spherical_basis(2, 3, [0, 0, 1])

    def test_term_counts(self):
        assert [len(harmonic_keys("spherical", l)) for l in range(4)] == [1, 4, 9, 16]
        assert [len(harmonic_keys("cylindrical", l)) for l in range(4)] == [1, 3, 5, 7]


class TestSphericalFit:
    DIRS = fibonacci_sphere(500)

    def test_constant(self):
        h = spherical_fit(self.DIRS, np.ones(500), 3)
        assert abs(h.coeffs[(0, 0)] - math.sqrt(4 * math.pi)) < 1e-6
        assert max(abs(v) for k, v in h.coeffs.items() if k != (0, 0)) < 1e-10

    @pytest.mark.parametrize("max_l", [1, 2, 3])
    def test_round_trip(self, rng, max_l):
        h = random_expansion("spherical", max_l, rng)
        back = spherical_fit(self.DIRS, spherical_evaluate(h, self.DIRS), max_l)
        np.testing.assert_allclose(back.vector(), h.vector(), rtol=1e-6, atol=1e-6 * np.abs(h.vector()).max())

    def test_single_harmonic(self):
        r = 1 + spherical_basis(2, 0, self.DIRS)
        h = spherical_fit(self.DIRS, r, 3)
        for key, value in h.coeffs.items():
            expected = {(0, 0): math.sqrt(4 * math.pi), (2, 0): 1.0}.get(key, 0.0)
            assert abs(value - expected) < 1e-6

    def test_invariants(self):
        h = HarmonicExpansion("spherical", 3, {(2, 1): 2.0})
        assert spherical_invariants(h).tolist() == [0.0, 0.0, 4.0, 0.0]
        assert not np.any(spherical_invariants(HarmonicExpansion("spherical", 2, {})))

    @pytest.mark.parametrize("seed", range(5))
    def test_invariants_under_rotation(self, seed):
        rng = np.random.default_rng(seed)
        h = random_expansion("spherical", 3, rng)
        o = random_orthogonal(3, rng).entries
        # sample the same envelope with its directions expressed in a rotated frame
        r = spherical_evaluate(h, self.DIRS)
        moved = spherical_fit(self.DIRS @ o.T, r, 3)
        np.testing.assert_allclose(spherical_invariants(moved), spherical_invariants(h), rtol=1e-5)

    def test_too_few(self):
        with pytest.raises(ValueError):
            spherical_fit(self.DIRS[:8], np.ones(8), 2)
        with pytest.raises(ValueError):
            spherical_fit(self.DIRS, np.ones(500), 4)


class TestExpansion:
    def test_kind_mismatch(self):
        with pytest.raises(ValueError):
            spherical_invariants(HarmonicExpansion("cylindrical", 1, {}))
        with pytest.raises(ValueError):
            cylindrical_invariants(HarmonicExpansion("spherical", 1, {}))

    def test_bad_key(self):
        with pytest.raises(ValueError):
            HarmonicExpansion("cylindrical", 1, {(1, 0): 1.0})
        with pytest.raises(ValueError):
            HarmonicExpansion("toroidal", 1, {})

    def test_json(self, rng):
        h = random_expansion("spherical", 2, rng)
        assert HarmonicExpansion.from_dict(h.to_dict()) == h
        with pytest.raises(InputError):
            HarmonicExpansion.from_dict({"coeffs": []})


class TestAgainstCatalog:
    """Envelopes with equal harmonic power but shifted relative phase."""

    PHI = 2 * np.pi * np.arange(256) / 256

    def fitted(self, r):
        from polyinv.fitting import PointCloud, fit_spherical

        pts = r[:, None] * np.stack([np.cos(self.PHI), np.sin(self.PHI)], axis=1)
        return fit_spherical(PointCloud(pts), 4)[0]

    def test_phase_only_visible_to_coupling_graphs(self):
        from polyinv.catalog import CatalogConfig, distance, feature_vector
        from polyinv.contraction import enumerate_graphs

        def env(shift, turn=0.0):
            phi = self.PHI - turn
            return 1 + 0.15 * np.cos(2 * phi) + 0.1 * np.cos(3 * (phi - shift))

        cfg = CatalogConfig(extra_graphs=tuple(enumerate_graphs("3:p,3:p,4:p,4:p,4:p")))
        shapes = [env(0.0), env(0.4), env(0.0, turn=1.1)]
        a = [cylindrical_invariants(cylindrical_fit(self.PHI, r, 4)) for r in shapes]
        f = [feature_vector(self.fitted(r), cfg) for r in shapes]
        np.testing.assert_allclose(a[1], a[0], atol=1e-12)
        assert distance(f[0], f[1]) > 1e-4
        assert distance(f[0], f[2]) < 1e-10
