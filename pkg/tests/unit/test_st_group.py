"""
Unit tests for Sato-Tate group models, Haar sampling and exact moments.
"""

import pytest
import numpy as np

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent / "src"))

from src.sato_tate.catalog import ComponentTag
from src.sato_tate.errors import (
    EmbeddingError,
    EmptySampleError,
    InconsistencyError,
    UnsupportedError,
)
from src.sato_tate.groups import cyclic_group, direct_product
from src.sato_tate.st_group import (
    CoefficientSamples,
    HaarSample,
    IdentityComponent,
    STModel,
    build_model,
    catalog_model_ids,
    coefficient_stats,
    exact_moments,
    is_unitary_symplectic,
    model_from_id,
    sample,
    sample_coefficients,
    symplectic_form,
)


def rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


@pytest.mark.unit
class TestIdentityComponent:
    """Test identity components and their embeddings."""

    def test_default_lie_dim(self):
        assert IdentityComponent(tag="USp4", g=2).lie_dim == 10
        assert IdentityComponent(tag=ComponentTag.U1, g=3).lie_dim == 1

    def test_wrong_genus(self):
        with pytest.raises(EmbeddingError):
            IdentityComponent(tag="SU2", g=2)

    def test_unknown_tag(self):
        with pytest.raises(EmbeddingError):
            IdentityComponent(tag="G2", g=3)

    def test_mismatched_dimension(self):
        with pytest.raises(EmbeddingError):
            IdentityComponent(tag="SU2", g=1, lie_dim=1)

    def test_random_elements_are_contained(self):
        rng = np.random.default_rng(3)
        for tag, g in [("SU2", 1), ("U1xSU2", 2), ("SU2xSU2", 2), ("USp4", 2), ("SU2diag", 3)]:
            component = IdentityComponent(tag=tag, g=g)
            for _ in range(5):
                assert component.contains(component.random_element(rng))

    def test_torus_does_not_contain_full_su2(self):
        rng = np.random.default_rng(4)
        su2 = IdentityComponent(tag="SU2", g=1).random_element(rng)
        assert not IdentityComponent(tag="U1", g=1).contains(su2)

    def test_abelian(self):
        assert IdentityComponent(tag="U1xU1", g=2).is_abelian
        assert not IdentityComponent(tag="U1xSU2", g=2).is_abelian


@pytest.mark.unit
class TestSTModel:
    """Test coset representative validation."""

    def test_symplectic_form(self):
        assert is_unitary_symplectic(symplectic_form(2))
        assert not is_unitary_symplectic(2 * np.eye(4))

    def test_normalizer(self):
        u1 = IdentityComponent(tag="U1", g=1)
        with pytest.raises(EmbeddingError):
            STModel(component=u1, pi0=cyclic_group(2), coset_reps=(np.eye(2), rotation(np.pi / 4)))

    def test_neutral_coset_must_be_identity(self):
        u1 = IdentityComponent(tag="U1", g=1)
        with pytest.raises(EmbeddingError):
            STModel(component=u1, pi0=cyclic_group(2), coset_reps=(symplectic_form(1), np.eye(2)))

    def test_rep_count(self):
        u1 = IdentityComponent(tag="U1", g=1)
        with pytest.raises(EmbeddingError):
            STModel(component=u1, pi0=cyclic_group(2))

    def test_usp_needs_trivial_pi0(self):
        usp4 = IdentityComponent(tag="USp4", g=2)
        with pytest.raises(EmbeddingError):
            STModel(component=usp4, pi0=cyclic_group(2), coset_reps=(np.eye(4), np.eye(4)))

    def test_non_symplectic_rep(self):
        u1 = IdentityComponent(tag="U1", g=1)
        with pytest.raises(EmbeddingError):
            STModel(component=u1, pi0=cyclic_group(2), coset_reps=(np.eye(2), np.diag([1, -1])))

    def test_built_in_models(self):
        assert build_model("U1xU1", 2, cyclic_group(4)).order == 4
        assert build_model("SU2xSU2", 2, cyclic_group(2)).label == "SU2xSU2/2"

    def test_non_cyclic_pi0_rejected(self):
        klein = direct_product(cyclic_group(2), cyclic_group(2))
        with pytest.raises(EmbeddingError):
            build_model("U1xU1", 2, klein)

    def test_trace_free_cosets(self):
        assert build_model("U1", 1).trace_free_cosets() == []
        assert build_model("U1", 1, cyclic_group(2)).trace_free_cosets() == [1]
        assert build_model("U1xU1", 2, cyclic_group(4)).trace_free_cosets() == [1, 2, 3]
        assert build_model("U1xSU2", 2, cyclic_group(2)).trace_free_cosets() == []


@pytest.mark.unit
class TestModelIds:
    """Test group ids."""

    def test_normalizer_of_torus(self):
        model = model_from_id("N(U1)", 1)
        assert model.model_id == "N(U1)"
        assert model.label == "U1/2"
        assert model.order == 2

    def test_order_suffix(self):
        model = model_from_id("U1xU1/4", 2)
        assert model.model_id == "U1xU1/4"
        assert model.g == 2

    def test_plain_tag(self):
        assert model_from_id("SU2", 1).model_id == "SU2"

    @pytest.mark.parametrize("model_id,g", [("G2", 1), ("SU2", 2), ("USp4/2", 2), ("U1xU1/x", 2)])
    def test_invalid(self, model_id, g):
        with pytest.raises(EmbeddingError):
            model_from_id(model_id, g)

    def test_catalog_ids(self):
        assert catalog_model_ids(1) == ["U1", "N(U1)", "SU2"]
        assert "U1xU1/4" in catalog_model_ids(2)
        assert "USp6" in catalog_model_ids(3)


@pytest.mark.unit
class TestExactMoments:
    """Test quadrature moments against known Haar values."""

    def test_su2(self):
        report = exact_moments(build_model("SU2", 1), 8)
        assert report.exact
        assert report.a1 == pytest.approx((1, 0, 1, 0, 2, 0, 5, 0, 14), abs=1e-6)
        assert report.zero_density == 0

    def test_u1(self):
        report = exact_moments(build_model("U1", 1), 4)
        assert report.moment(2) == pytest.approx(2, abs=1e-8)
        assert report.moment(4) == pytest.approx(6, abs=1e-8)

    def test_normalizer_of_torus(self):
        report = model_from_id("N(U1)", 1).exact_moments(6)
        assert [report.moment(k) for k in (2, 4, 6)] == pytest.approx([1, 3, 10], abs=1e-8)
        assert report.zero_density == 0.5

    def test_usp4(self):
        report = exact_moments(build_model("USp4", 2), 6)
        assert [report.moment(k) for k in (2, 4, 6)] == pytest.approx([1, 3, 14], abs=1e-4)
        assert report.a2_moment(1) == pytest.approx(1, abs=1e-4)

    def test_quarter_turn(self):
        report = model_from_id("U1xU1/4", 2).exact_moments(2)
        assert report.moment(2) == pytest.approx(1, abs=1e-8)
        assert report.zero_density == 0.75

    def test_pair_swap(self):
        report = model_from_id("SU2xSU2/2", 2).exact_moments(2)
        assert report.moment(2) == pytest.approx(1, abs=1e-6)
        assert report.zero_density == 0.5

    def test_order_limit(self):
        with pytest.raises(UnsupportedError):
            exact_moments(build_model("SU2", 1), 11)

    @pytest.mark.slow
    def test_usp6(self):
        report = exact_moments(build_model("USp6", 3), 4)
        assert report.moment(2) == pytest.approx(1, abs=5e-3)


@pytest.mark.unit
class TestSampling:
    """Test Haar sampling."""

    def test_reproducible(self):
        model = model_from_id("N(U1)", 1)
        first, second = sample(model, 5, 500), sample(model, 5, 500)
        assert np.array_equal(first.labels, second.labels)
        assert np.array_equal(first.diagonals, second.diagonals)
        assert not np.array_equal(sample(model, 6, 500).diagonals, first.diagonals)

    def test_shards_are_independent_of_n(self):
        model = build_model("SU2", 1)
        short = sample(model, 9, 10, shard_size=10)
        long = sample(model, 9, 100, shard_size=10)
        assert np.array_equal(short.diagonals, long.diagonals[:10])

    def test_samples_are_unitary_symplectic(self):
        samples = sample(model_from_id("SU2xSU2/2", 2), 1, 50)
        for item in samples:
            assert is_unitary_symplectic(item.matrix)
        assert samples[0].label in (0, 1)

    def test_charpoly(self):
        item = sample(build_model("SU2", 1), 2, 1)[0]
        poly = item.charpoly()
        assert poly[1] == pytest.approx(-np.trace(item.matrix))
        assert poly[2] == pytest.approx(1)

    @pytest.mark.parametrize("model_id,g", [("U1xU1/4", 2), ("SU2xSU2/2", 2), ("USp4", 2)])
    def test_charpoly_self_reciprocal(self, model_id, g):
        for item in sample(model_from_id(model_id, g), 8, 25):
            poly = item.charpoly()
            assert len(poly) == 2 * g + 1
            assert np.allclose(poly, np.conj(poly[::-1]), rtol=0, atol=1e-9)

    def test_bad_matrix(self):
        with pytest.raises(InconsistencyError):
            HaarSample(matrix=2 * np.eye(2), label=0)

    def test_coset_counts(self):
        samples = sample(model_from_id("U1xU1/4", 2), 3, 4000)
        counts = samples.coset_counts()
        n, k = 4000, 4
        assert counts.sum() == n
        assert len(counts) == k
        sigma = np.sqrt(n * (1 / k) * (1 - 1 / k))
        assert np.all(np.abs(counts - n / k) <= 5 * sigma)

    def test_coefficients_match_streaming(self):
        model = model_from_id("U1xSU2/2", 2)
        full = sample(model, 11, 300, shard_size=64).coefficients()
        streamed = sample_coefficients(model, 11, 300, shard_size=64)
        assert np.allclose(full.a1, streamed.a1)
        assert np.allclose(full.a2, streamed.a2)

    def test_a1_matches_matrix_trace(self):
        samples = sample(model_from_id("U1xU1/4", 2), 4, 20)
        a1 = samples.coefficients().a1
        for i, item in enumerate(samples):
            assert a1[i] == pytest.approx(-np.trace(item.matrix).real)

    def test_non_positive_count(self):
        with pytest.raises(UnsupportedError):
            sample(build_model("SU2", 1), 0, 0)

    def test_empty_stats(self):
        empty = CoefficientSamples(group="SU2/1", g=1, a1=np.array([]), labels=np.array([]))
        with pytest.raises(EmptySampleError):
            coefficient_stats(empty)


@pytest.mark.unit
class TestMonteCarlo:
    """Test sampled moments against the exact profile."""

    def test_su2(self):
        report = coefficient_stats(sample_coefficients(build_model("SU2", 1), 1, 200000))
        assert report.moment(2) == pytest.approx(1, abs=0.02)
        assert report.moment(4) == pytest.approx(2, abs=0.05)
        assert report.count == 200000

    def test_normalizer_of_torus(self):
        report = coefficient_stats(sample_coefficients(model_from_id("N(U1)", 1), 2, 100000))
        assert report.zero_density == pytest.approx(0.5, abs=0.01)
        assert report.moment(2) == pytest.approx(1, abs=0.03)

    @pytest.mark.slow
    def test_usp4(self):
        model = build_model("USp4", 2)
        report = coefficient_stats(sample_coefficients(model, 3, 200000))
        exact = model.exact_moments(4)
        assert report.moment(2) == pytest.approx(1, abs=0.02)
        assert report.moment(4) == pytest.approx(3, abs=0.1)
        assert report.a2_moment(1) == pytest.approx(exact.a2_moment(1), abs=0.02)

    @pytest.mark.slow
    def test_pair_swap(self):
        model = model_from_id("SU2xSU2/2", 2)
        report = coefficient_stats(sample_coefficients(model, 4, 200000))
        exact = model.exact_moments(4)
        assert report.moment(4) == pytest.approx(exact.moment(4), abs=0.1)
        assert report.a2_moment(2) == pytest.approx(exact.a2_moment(2), abs=0.1)
        assert report.zero_density == pytest.approx(0.5, abs=0.01)

    @pytest.mark.parametrize("model_id,g", [(i, 1) for i in catalog_model_ids(1)] + [(i, 2) for i in catalog_model_ids(2)])
    def test_catalog_within_five_stderr(self, model_id, g):
        model = model_from_id(model_id, g)
        report = coefficient_stats(sample_coefficients(model, 12, 100000))
        exact = model.exact_moments(6)
        for k in (2, 4, 6):
            assert abs(report.a1[k] - exact.a1[k]) <= 5 * report.a1_stderr[k] + 1e-6
        assert abs(report.zero_density - exact.zero_density) <= 5 * report.zero_stderr + 1e-6

    @pytest.mark.slow
    @pytest.mark.parametrize("model_id", catalog_model_ids(3))
    def test_genus3_catalog_within_five_stderr(self, model_id):
        model = model_from_id(model_id, 3)
        report = coefficient_stats(sample_coefficients(model, 13, 100000))
        exact = model.exact_moments(6)
        for k in (2, 4, 6):
            slack = 1e-3 * max(1.0, abs(exact.a1[k]))
            assert abs(report.a1[k] - exact.a1[k]) <= 5 * report.a1_stderr[k] + slack
