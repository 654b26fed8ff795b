import numpy as np
import pytest
from hypothesis import given, settings

from daugavet.exceptions import CapabilityError, ConstructionError, DimensionMismatchError
from daugavet.models.enums import Exactness, ScalarField, SumKind
from daugavet.models.space import Lp, Polyhedral, Sum
from daugavet.services.space_service import SpaceService
from daugavet.services.structure_service import StructureService
from daugavet.utils import polytope_utils as pu
from tests.conftest import vectors


def as_set(points):
    return {tuple(np.round(p, 9)) for p in np.asarray(points)}


class TestMakeSpace:
    def test_linf_square_extremes(self):
        space = SpaceService.make_space({"field": "real", "descriptor": {"lp": {"p": "inf", "dim": 2}}})
        assert as_set(SpaceService.extreme_points(space)) == {(1, 1), (1, -1), (-1, 1), (-1, -1)}

    def test_sum_dimension(self):
        space = SpaceService.make_space({"descriptor": {"sum": {"kind": "l1", "parts": [
            {"lp": {"p": 2, "dim": 2}}, {"lp": {"p": 1, "dim": 3}}]}}})
        assert space.dim == 5
        assert isinstance(space.descriptor, Sum)

    def test_polyhedral_drops_interior_vertex(self):
        space = SpaceService.polyhedral([[1, 0], [0, 1], [1, 1], [0.5, 0.5]])
        assert as_set(space.descriptor.vertices) == {(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)}

    def test_describe_round_trip(self):
        descriptor = {"field": "complex", "descriptor": {"sum": {"kind": "linf", "parts": [
            {"lp": {"p": 2, "dim": 2}}, {"lp": {"p": "inf", "dim": 1}}]}}}
        space = SpaceService.make_space(descriptor)
        again = SpaceService.make_space(SpaceService.describe(space))
        assert again.label == space.label == "(cl2^2 (+)inf clinf^1)"
        assert SpaceService.describe(again) == SpaceService.describe(space)

    @pytest.mark.parametrize("descriptor", [
        {"lp": {"p": 0.5, "dim": 2}},
        {"polyhedral": {"vertices": [[1, 1], [2, 2]]}},
        {"sup_subspace": {"nodes": [0, 1], "basis": [[1, 1], [1, 1]]}},
        {"sum": {"kind": "l1", "parts": []}},
        {"banana": {}},
    ])
    def test_degenerate_descriptors(self, descriptor):
        with pytest.raises(ConstructionError):
            SpaceService.make_space({"descriptor": descriptor})

    def test_complex_polyhedral_rejected(self):
        with pytest.raises(ConstructionError):
            SpaceService.make_space({"field": "complex", "descriptor": {"polyhedral": {"vertices": [[1, 0], [0, 1]]}}})


class TestNorm:
    def test_examples(self, l1_2, linf_2, l2_2):
        assert SpaceService.norm(l1_2, [1, -2]) == pytest.approx(3)
        assert SpaceService.norm(linf_2, [1, -2]) == pytest.approx(2)
        space = StructureService.l1_sum([l2_2, SpaceService.lp(1, 1)])
        assert SpaceService.norm(space, [3, 4, 1]) == pytest.approx(6)

    def test_zero_vector(self, hexagon):
        assert SpaceService.norm(hexagon, [0, 0]) == 0

    def test_dimension_mismatch(self, l1_2):
        with pytest.raises(DimensionMismatchError):
            SpaceService.norm(l1_2, [1, 2, 3])

    def test_polyhedral_lp_matches_dual_vertices(self, hexagon):
        rng = np.random.default_rng(0)
        facets = SpaceService.dual(hexagon).descriptor.vertices
        for x in rng.standard_normal((50, 2)):
            assert SpaceService.norm(hexagon, x) == pytest.approx(np.max(np.abs(facets @ x)), abs=1e-9)

    def test_sums_combine_part_norms(self, l2_2, l1_3):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(5)
        parts = (np.linalg.norm(x[:2]), np.abs(x[2:]).sum())
        assert SpaceService.norm(StructureService.l1_sum([l2_2, l1_3]), x) == pytest.approx(sum(parts))
        assert SpaceService.norm(StructureService.linf_sum([l2_2, l1_3]), x) == pytest.approx(max(parts))

    @settings(max_examples=50, deadline=None)
    @given(vectors(2), vectors(2))
    def test_norm_axioms_hexagon(self, x, y):
        space = SpaceService.polyhedral([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        nx, ny = SpaceService.norm(space, x), SpaceService.norm(space, y)
        assert SpaceService.norm(space, x + y) <= nx + ny + 1e-9
        assert SpaceService.norm(space, -2.5 * x) == pytest.approx(2.5 * nx, abs=1e-9)
        assert (nx == 0) == (not np.any(x))

    @settings(max_examples=50, deadline=None)
    @given(vectors(3), vectors(3))
    def test_norm_axioms_sum(self, x, y):
        space = StructureService.linf_sum([SpaceService.lp(2, 2), SpaceService.lp(1, 1)])
        assert SpaceService.norm(space, x + y) <= SpaceService.norm(space, x) + SpaceService.norm(space, y) + 1e-9


class TestDual:
    def test_l1_dual_is_square(self, l1_2):
        dual = SpaceService.dual_space(l1_2)
        assert isinstance(dual.descriptor, Lp) and np.isinf(dual.descriptor.p)

    def test_sum_dual_swaps_kind(self, l2_2):
        dual = SpaceService.dual_space(StructureService.l1_sum([l2_2, SpaceService.lp(1, 2)]))
        assert dual.descriptor.kind is SumKind.LINF
        assert [p.descriptor.p for p in dual.parts] == [2.0, float("inf")]

    def test_polar_involution(self, hexagon):
        twice = SpaceService.dual_space(SpaceService.dual_space(hexagon))
        assert isinstance(twice.descriptor, Polyhedral)
        assert pu.same_vertex_set(twice.descriptor.vertices, hexagon.descriptor.vertices, 1e-9)

    def test_sup_subspace_dual_is_polyhedral(self):
        space = SpaceService.sup_subspace((0, 1, 2), [[1, 0], [0, 1], [1, 1]])
        dual = SpaceService.dual_space(space)
        assert isinstance(dual.descriptor, Polyhedral)
        assert as_set(dual.descriptor.vertices) == {(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)}


class TestPairs:
    @pytest.mark.parametrize("p", [1, "inf"])
    def test_eight_exact_pairs(self, p):
        pairs = SpaceService.duality_pairs(SpaceService.lp(p, 2))
        assert len(pairs) == 8
        assert pairs.exactness is Exactness.EXACT

    def test_pair_invariants(self, hexagon):
        pairs = SpaceService.duality_pairs(hexagon)
        dual = SpaceService.dual(hexagon)
        for pair in pairs:
            assert SpaceService.norm(hexagon, pair.x) == pytest.approx(1, abs=1e-9)
            assert SpaceService.norm(dual, pair.xstar) == pytest.approx(1, abs=1e-9)
            assert np.vdot(pair.xstar, pair.x).real == pytest.approx(1, abs=1e-9)

    def test_hilbert_pairs_are_diagonal(self, l2_2):
        pairs = SpaceService.duality_pairs(l2_2, budget=17)
        assert pairs.exactness is Exactness.SAMPLED
        np.testing.assert_allclose(pairs.xs, pairs.fs)

    def test_smooth_lp_pairs_sampled(self):
        space = SpaceService.lp(3, 3)
        pairs = SpaceService.duality_pairs(space, budget=32)
        dual = SpaceService.dual(space)
        assert pairs.exactness is Exactness.SAMPLED
        np.testing.assert_allclose(SpaceService.norms(dual, pairs.fs), 1, atol=1e-6)
        np.testing.assert_allclose(np.einsum("ij,ij->i", pairs.fs, pairs.xs), 1, atol=1e-6)

    def test_sum_pairs_exact(self):
        space = StructureService.l1_sum([SpaceService.lp(1, 1), SpaceService.lp("inf", 2)])
        pairs = SpaceService.duality_pairs(space)
        assert pairs.exactness is Exactness.EXACT
        np.testing.assert_allclose(SpaceService.norms(space, pairs.xs), 1)


class TestExtremePoints:
    def test_l1_cross_polytope(self, l1_3):
        expected = {tuple(s * e) for s in (1, -1) for e in np.eye(3)}
        assert as_set(SpaceService.extreme_points(l1_3)) == expected

    def test_l1_sum_injects_parts(self):
        space = StructureService.l1_sum([SpaceService.lp(1, 1), SpaceService.lp(1, 1)])
        assert as_set(SpaceService.extreme_points(space)) == {(1, 0), (-1, 0), (0, 1), (0, -1)}

    def test_smooth_unsupported(self):
        with pytest.raises(CapabilityError):
            SpaceService.extreme_points(SpaceService.lp(3, 2))

    def test_complex_unsupported(self):
        with pytest.raises(CapabilityError):
            SpaceService.extreme_points(SpaceService.lp(1, 2, ScalarField.COMPLEX))
