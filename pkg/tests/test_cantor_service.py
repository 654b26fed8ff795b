import numpy as np
import pytest

from daugavet.exceptions import ConstructionError
from daugavet.models.enums import EmbeddingKind
from daugavet.services.cantor_service import CantorService
from daugavet.services.space_service import SpaceService


class TestGrid:
    def test_level_one(self):
        grid = CantorService.cantor_grid(1, 27)
        assert len(grid.cantor_nodes) == 20
        np.testing.assert_array_equal(grid.gap_nodes, np.arange(10, 18))
        assert grid.gap_runs == [(10, 17)]
        assert grid.coverage == pytest.approx(8 / 28)

    def test_level_zero_is_all_cantor(self):
        grid = CantorService.cantor_grid(0, 3)
        assert len(grid.cantor_nodes) == 4
        assert len(grid.gap_nodes) == 0

    def test_level_two(self):
        grid = CantorService.cantor_grid(2, 9)
        np.testing.assert_array_equal(grid.gap_nodes, [4, 5])

    @pytest.mark.parametrize("k, m", [(1, 10), (-1, 3), (2, 0)])
    def test_bad_resolution(self, k, m):
        with pytest.raises(ConstructionError):
            CantorService.cantor_grid(k, m)

    def test_grid_report(self):
        report = CantorService.grid_report(CantorService.cantor_grid(1, 27))
        assert (report.cantor_nodes, report.gap_nodes) == (20, 8)


class TestBuild:
    @pytest.mark.parametrize("kind, dim", [
        (EmbeddingKind.CONSTANTS, 9),
        (EmbeddingKind.ZERO, 8),
        (EmbeddingKind.L2_2, 10),
        (EmbeddingKind.FULL, 28),
    ])
    def test_dimensions(self, kind, dim):
        assert CantorService.build_kind(1, 27, kind).dim == dim

    def test_zero_without_gaps_is_rejected(self):
        with pytest.raises(ConstructionError):
            CantorService.build_kind(0, 3, EmbeddingKind.ZERO)

    def test_wrong_basis_shape(self):
        with pytest.raises(ConstructionError):
            CantorService.build_XE(CantorService.cantor_grid(1, 27), np.ones((5, 1)))

    def test_sup_norm_of_nodes(self):
        xe = CantorService.build_kind(1, 27, EmbeddingKind.CONSTANTS)
        x = np.zeros(xe.dim)
        x[0], x[3] = 0.5, -2.0
        assert SpaceService.norm(xe.space, x) == pytest.approx(2.0)
        assert np.max(np.abs(xe.node_values(x))) == pytest.approx(2.0)

    def test_linf_form_keeps_dimension(self):
        xe = CantorService.build_kind(1, 27, EmbeddingKind.L2_2)
        view, perm = CantorService.linf_form(xe)
        assert view.dim == xe.dim
        assert sorted(perm) == list(range(xe.dim))


class TestEmbedding:
    @pytest.mark.parametrize("count", [3, 20, 81])
    def test_error_within_bound(self, count):
        report = CantorService.embed_report(count)
        assert 0 <= report.max_error <= report.error_bound

    def test_too_few_nodes(self):
        with pytest.raises(ConstructionError):
            CantorService.embed_l2_in_sup(2)


class TestBumps:
    def test_middle_third(self):
        xe = CantorService.build_kind(1, 27, EmbeddingKind.CONSTANTS)
        report = CantorService.bump_report(xe, (1 / 3, 2 / 3))
        assert report.found
        assert report.node == 13

    def test_narrow_interval_needs_refinement(self):
        xe = CantorService.build_kind(1, 27, EmbeddingKind.CONSTANTS)
        assert not CantorService.bump_report(xe, (0.30, 0.34)).found
        report = CantorService.refine_bump(1, 27, (0.30, 0.34))
        assert report.found
        assert report.attempts == [27, 81, 243, 729]
        assert report.node == 244

    def test_refinement_gives_up(self):
        report = CantorService.refine_bump(1, 27, (0.30, 0.34), max_m=243)
        assert not report.found
        assert report.attempts == [27, 81, 243]


class TestQuotient:
    @pytest.mark.parametrize("kind", [EmbeddingKind.CONSTANTS, EmbeddingKind.L2_2])
    def test_restriction_is_quotient(self, kind):
        xe = CantorService.build_kind(1, 27, kind)
        assert CantorService.quotient_isometry_check(xe).holds

    def test_affine_extension_interpolates(self):
        xe = CantorService.build_kind(1, 27, EmbeddingKind.CONSTANTS)
        f = CantorService.affine_extension(xe, [0.5])
        np.testing.assert_allclose(xe.node_values(f), 0.5)


def test_gap_functionals_have_norm_one():
    xe = CantorService.build_kind(1, 27, EmbeddingKind.CONSTANTS)
    report = CantorService.gap_functional_norms(xe)
    assert report.gap_nodes == 8
    assert report.min_norm == pytest.approx(1.0)
    assert report.max_norm == pytest.approx(1.0)
    assert report.witnessed == 8
