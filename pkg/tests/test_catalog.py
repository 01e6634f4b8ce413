import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polyinv.catalog import (
    CatalogConfig,
    FeatureVector,
    base_invariants,
    distance,
    eigenvalues_from_traces,
    elementary_from_power_sums,
    feature_vector,
    graph_invariants,
    invariant_count_bound,
    mixed_invariants,
    next_power_sum,
    reconstruct_degree2,
    relative_invariants,
    spherical_count_bound,
)
from polyinv.contraction import evaluate_graph, pair_graph
from polyinv.errors import DegenerateSpectrumError, InputError
from polyinv.tensor_poly import Polynomial, apply_rotation, quadratic_matrix, random_orthogonal

from conftest import abs_poly, assert_rel

FULL = CatalogConfig(include_mixed=True, insertions=2, extra_graphs=("2:p,3:p,3:p ; 0-1,0-2,1-2,1-2",))


def diag2(lams, lin, const=0.0):
    n = len(lams)
    coeffs = {(0,) * n: const}
    for a in range(n):
        e = [0] * n
        e[a] = 1
        coeffs[tuple(e)] = lin[a]
        e[a] = 2
        coeffs[tuple(e)] = lams[a]
    return Polynomial.from_mapping(n, coeffs, max_degree=2)


def assert_invariant(p, cfg, rng, count=20, rtol=1e-9):
    f = feature_vector(p, cfg)
    scale = feature_vector(abs_poly(p), cfg).values
    for k in range(count):
        o = random_orthogonal(p.n, rng, det=1 if k % 2 else -1)
        g = feature_vector(apply_rotation(p, o), cfg)
        assert g.names == f.names
        assert_rel(g.values, f.values, rtol, scale=scale * 1e-3)


class TestBase:
    def test_constant(self):
        f = base_invariants(Polynomial.from_mapping(2, {(0, 0): 7.0}))
        assert f.values[0] == 7.0
        assert not np.any(f.values[1:])
        assert f.names == ("const", "linear", "trace^1", "trace^2")

    def test_linear(self):
        f = base_invariants(Polynomial.from_mapping(2, {(1, 0): 3.0, (0, 1): 4.0}))
        assert f["linear"] == 25.0

    def test_names_follow_degree(self):
        f = base_invariants(Polynomial.zeros(3, 5))
        assert f.names == ("const", "linear", "trace^1", "trace^2", "trace^3", "pair3", "pair4", "pair5")

    def test_pair_equals_graph(self, rng):
        p = Polynomial.random(3, 4, rng)
        f = base_invariants(p)
        for d in (3, 4):
            assert_rel(f[f"pair{d}"], evaluate_graph(pair_graph(d), p), 1e-12)

    def test_invariant(self, rng):
        assert_invariant(Polynomial.random(3, 3, rng), CatalogConfig(), rng)


class TestMixed:
    def test_weighted_eigen(self):
        p = diag2([2.0, 3.0], [1.0, 0.0])
        assert mixed_invariants(p, [1])["mixed^1"] == 2.0

    def test_m0_is_linear(self, rng):
        p = Polynomial.random(3, 2, rng)
        assert mixed_invariants(p, [0])["mixed^0"] == base_invariants(p)["linear"]

    def test_normal_form_identity(self, rng):
        lams, lin = rng.standard_normal(3), rng.standard_normal(3)
        p = diag2(lams, lin)
        f = mixed_invariants(p)
        for m in range(3):
            assert_rel(f[f"mixed^{m}"], np.sum(lams**m * lin**2), 1e-13)

    def test_invariant(self, rng):
        assert_invariant(Polynomial.random(3, 4, rng), CatalogConfig(include_mixed=True, insertions=2), rng)

    def test_insertion_names(self, rng):
        f = mixed_invariants(Polynomial.random(2, 4, rng), powers=[0, 1], insertions=1)
        assert f.names == ("mixed^0", "mixed^1", "pair3+ins1", "pair4+ins1")


class TestRelative:
    def test_self(self, rng):
        p = Polynomial.random(3, 3, rng)
        r = relative_invariants(p, p)
        assert r["cross1"] == base_invariants(p)["linear"]
        assert_rel(r["cross2"], np.sum(quadratic_matrix(p) ** 2), 1e-13)
        assert r["cross3"] == base_invariants(p)["pair3"]

    def test_joint_rotation(self, rng):
        p, q = Polynomial.random(3, 3, rng), Polynomial.random(3, 2, rng)
        r = relative_invariants(p, q)
        for _ in range(10):
            o = random_orthogonal(3, rng)
            assert_rel(relative_invariants(apply_rotation(p, o), apply_rotation(q, o)).values, r.values, 1e-9,
                       scale=1e-3)

    def test_orthogonal_linear(self):
        p = Polynomial.from_mapping(2, {(1, 0): 1.0})
        q = Polynomial.from_mapping(2, {(0, 1): 1.0})
        assert relative_invariants(p, q)["cross1"] == 0.0

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError):
            relative_invariants(Polynomial.random(2, 2, rng), Polynomial.random(3, 2, rng))


class TestCounts:
    @pytest.mark.parametrize("n,d,expected", [(3, 2, 3), (2, 3, 3), (3, 3, 7), (2, 2, 2)])
    def test_invariant_bound(self, n, d, expected):
        assert invariant_count_bound(n, d) == expected

    @pytest.mark.parametrize("n,D,expected", [(2, 3, 6), (3, 2, 6), (2, 2, 4), (3, 3, 13)])
    def test_spherical_bound(self, n, D, expected):
        assert spherical_count_bound(n, D) == expected

    def test_degree2_bound_is_n(self):
        for n in range(2, 8):
            assert invariant_count_bound(n, 2) == n

    def test_domain(self):
        with pytest.raises(ValueError):
            invariant_count_bound(1, 2)
        with pytest.raises(ValueError):
            spherical_count_bound(3, 1)


class TestFeatureVector:
    def test_zero(self):
        f = feature_vector(Polynomial.zeros(3, 4), FULL)
        assert not np.any(f.values)

    def test_catalog_order(self, rng):
        f = feature_vector(Polynomial.random(2, 3, rng), FULL)
        assert f.names == (
            "const", "linear", "trace^1", "trace^2", "pair3",
            "mixed^0", "mixed^1", "pair3+ins1", "pair3+ins2",
            "graph[2:p,3:p,3:p ; 0-1,0-2,1-2,1-2]",
        )

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_invariant(self, rng, n):
        assert_invariant(Polynomial.random(n, 4, rng), FULL, rng)

    def test_order_normalization_scaling(self, rng):
        cfg = CatalogConfig(include_mixed=True, insertions=1, normalize_by_order=True)
        for d in (1, 2, 3):
            coeffs = np.zeros(len(Polynomial.zeros(3, 3).coefficients()))
            p = Polynomial.from_coefficients(3, 3, coeffs)
            p = Polynomial(3, tuple(Polynomial.random(3, 3, rng).parts[k] if k == d else p.parts[k] for k in range(4)))
            s = 2.5
            f, g = feature_vector(p, cfg), feature_vector(p.scaled(s), cfg)
            np.testing.assert_allclose(g.values, s * f.values, rtol=1e-12, atol=1e-12)

    def test_order_normalization_sign(self):
        p = diag2([-2.0, -3.0], [0.0, 0.0])
        f = feature_vector(p, CatalogConfig(normalize_by_order=True))
        assert f["trace^1"] == -5.0
        assert f["trace^2"] == pytest.approx(math.sqrt(13.0), rel=1e-15)

    def test_bad_mixed_powers(self, rng):
        with pytest.raises(ValueError):
            feature_vector(Polynomial.random(2, 2, rng), CatalogConfig(include_mixed=True, mixed_powers=(0, 2)))

    def test_extra_graphs_sorted(self, rng):
        p = Polynomial.random(2, 3, rng)
        a = graph_invariants(p, ["3:p,3:p ; 0-1,0-1,0-1", "3:p,3:p ; 0-0,0-1,1-1"])
        b = graph_invariants(p, ["3:p,3:p ; 0-0,0-1,1-1", "3:p,3:p ; 0-1,0-1,0-1"])
        assert a.names == b.names

    def test_json_roundtrip(self, rng):
        f = feature_vector(Polynomial.random(3, 3, rng), FULL, normalization={"mode": "unit"})
        g = FeatureVector.from_dict(f.to_dict())
        assert g.names == f.names and np.array_equal(g.values, f.values) and g.meta == f.meta
        assert set(f.to_dict()) == {"meta", "features"}
        assert f.to_dict()["meta"]["n"] == 3

    def test_unique_names(self):
        with pytest.raises(ValueError):
            FeatureVector(("a", "a"), [1.0, 2.0])


class TestCompleteness:
    def test_degree1(self, rng):
        cfg = CatalogConfig(max_trace_power=0)
        for _ in range(20):
            u = rng.standard_normal(3)
            v = random_orthogonal(3, rng).entries @ u
            pu = Polynomial.from_coefficients(3, 1, np.r_[0.0, u])
            pv = Polynomial.from_coefficients(3, 1, np.r_[0.0, v])
            assert_rel(feature_vector(pu, cfg).values, feature_vector(pv, cfg).values, 1e-12)
            pw = Polynomial.from_coefficients(3, 1, np.r_[0.0, 1.1 * v])
            assert abs(feature_vector(pu, cfg)["linear"] - feature_vector(pw, cfg)["linear"]) > 1e-3

    def test_degree2(self, rng):
        for _ in range(20):
            lams = rng.standard_normal(3)
            o1, o2 = random_orthogonal(3, rng).entries, random_orthogonal(3, rng).entries
            a, b = o1 @ np.diag(lams) @ o1.T, o2 @ np.diag(lams) @ o2.T
            pa = Polynomial.from_mapping(3, {}, 2)
            pa, pb = (
                Polynomial(3, (pa.parts[0], pa.parts[1], _from_matrix(m))) for m in (a, b)
            )
            fa, fb = base_invariants(pa), base_invariants(pb)
            assert_rel(fa.values, fb.values, 1e-9, scale=1.0)
            lams2 = lams.copy()
            lams2[0] += 1e-3
            pc = Polynomial(3, (pa.parts[0], pa.parts[1], _from_matrix(o1 @ np.diag(lams2) @ o1.T)))
            diffs = np.abs(base_invariants(pc).values - fa.values)
            assert diffs.max() > 1e-4


def _from_matrix(m):
    from polyinv.tensor_poly import HomogeneousPart

    return HomogeneousPart.from_tensor((m + m.T) / 2)


class TestDistance:
    def test_zero(self, rng):
        f = feature_vector(Polynomial.random(3, 3, rng), FULL)
        assert distance(f, f) == 0.0

    def test_rotated(self, rng):
        p = Polynomial.random(3, 3, rng)
        q = apply_rotation(p, random_orthogonal(3, rng))
        assert distance(feature_vector(p, FULL), feature_vector(q, FULL)) <= 1e-8

    def test_mismatch(self, rng):
        f = feature_vector(Polynomial.random(3, 3, rng))
        g = feature_vector(Polynomial.random(3, 2, rng))
        with pytest.raises(InputError):
            distance(f, g)

    def test_weights(self):
        f = FeatureVector(("a", "b"), [0.0, 0.0], {"n": 2, "D": 1})
        g = FeatureVector(("a", "b"), [3.0, 4.0], {"n": 2, "D": 1})
        assert distance(f, g) == 5.0
        assert distance(f, g, [4.0, 1.0]) == pytest.approx(math.sqrt(36 + 16))
        with pytest.raises(ValueError):
            distance(f, g, [1.0, 0.0])

    @given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3),
                              st.floats(0.1, 10)), min_size=1, max_size=8))
    def test_pseudometric(self, rows):
        a, b, c, w = (np.array(col) for col in zip(*rows))
        names = tuple(f"f{i}" for i in range(len(rows)))
        fa, fb, fc = (FeatureVector(names, v, {"n": 2, "D": 2}) for v in (a, b, c))
        assert distance(fa, fb, w) == distance(fb, fa, w)
        assert distance(fa, fc, w) <= distance(fa, fb, w) + distance(fb, fc, w) + 1e-9


class TestNewton:
    def test_elementary(self):
        lam = np.array([1.0, 2.0, 3.0])
        e = elementary_from_power_sums([np.sum(lam**m) for m in (1, 2, 3)])
        np.testing.assert_allclose(e, [1.0, 6.0, 11.0, 6.0])

    def test_next_power_sum(self):
        lam = np.array([1.0, -2.0, 0.5, 4.0])
        s = [np.sum(lam**m) for m in range(1, 5)]
        assert next_power_sum(s) == pytest.approx(np.sum(lam**5), rel=1e-13)

    def test_eigenvalues(self, rng):
        for _ in range(20):
            lam = np.sort(rng.standard_normal(4))
            got = eigenvalues_from_traces([np.sum(lam**m) for m in range(1, 5)])
            np.testing.assert_allclose(got, lam, atol=1e-6)


class TestReconstruct:
    CFG = CatalogConfig(include_mixed=True)

    def test_canonical_input(self):
        p = diag2([1.0, 2.0], [1.0, 1.0])
        r = reconstruct_degree2(feature_vector(p, self.CFG), 2)
        np.testing.assert_allclose(r.coefficients(), p.coefficients(), atol=1e-12)

    def test_rotation_class(self, rng):
        for _ in range(20):
            p = Polynomial.random(3, 2, rng)
            q = apply_rotation(p, random_orthogonal(3, rng))
            a = reconstruct_degree2(feature_vector(p, self.CFG), 3).coefficients()
            b = reconstruct_degree2(feature_vector(q, self.CFG), 3).coefficients()
            np.testing.assert_allclose(a, b, atol=1e-7)

    def test_reconstruction_reproduces_features(self, rng):
        p = Polynomial.random(4, 2, rng)
        f = feature_vector(p, self.CFG)
        g = feature_vector(reconstruct_degree2(f, 4), self.CFG)
        assert_rel(g.values, f.values, 1e-8, scale=1.0)

    def test_degenerate(self):
        p = diag2([1.0, 1.0, 1.0], [1.0, 0.0, 0.0])
        with pytest.raises(DegenerateSpectrumError):
            reconstruct_degree2(feature_vector(p, self.CFG), 3)

    def test_missing_features(self, rng):
        with pytest.raises(InputError):
            reconstruct_degree2(feature_vector(Polynomial.random(3, 2, rng)), 3)
