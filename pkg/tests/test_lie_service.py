import numpy as np
import pytest

from daugavet.exceptions import CapabilityError
from daugavet.models.enums import LieMethod, ScalarField, Verdict
from daugavet.models.operator import Operator
from daugavet.services.lie_service import LieService
from daugavet.services.numrange_service import NumRangeService
from daugavet.services.operator_service import OperatorService
from daugavet.services.space_service import SpaceService
from daugavet.services.structure_service import StructureService
from tests.conftest import J


class TestClassification:
    def test_rotation_is_skew_on_plane(self, l2_2):
        assert LieService.is_skew_hermitian(l2_2, J) is Verdict.YES

    def test_rotation_is_not_skew_on_l1(self, l1_2):
        assert LieService.is_skew_hermitian(l1_2, J) is Verdict.NO

    def test_zero_is_skew(self, hexagon):
        assert LieService.is_skew_hermitian(hexagon, np.zeros((2, 2))) is Verdict.YES

    def test_dissipative(self, l2_2):
        assert LieService.is_dissipative(l2_2, -np.eye(2)) is Verdict.YES
        assert LieService.is_dissipative(l2_2, np.eye(2)) is Verdict.NO
        N = np.array([[0.0, 0.0], [1.0, 0.0]])
        assert NumRangeService.sup_re(l2_2, N).value == pytest.approx(0.5)
        assert LieService.is_dissipative(l2_2, N) is Verdict.NO

    def test_hermitian(self, cl2_2):
        assert LieService.is_hermitian(cl2_2, np.diag([1.0, 2.0]).astype(complex)) is Verdict.YES
        assert LieService.is_hermitian(cl2_2, 1j * np.eye(2)) is Verdict.NO
        assert LieService.is_hermitian(cl2_2, np.array([[0, 1], [1, 0]], dtype=complex)) is Verdict.YES

    @pytest.mark.slow
    def test_hermitian_sweep(self):
        space = SpaceService.lp(2, 3, ScalarField.COMPLEX)
        rng = np.random.default_rng(19)
        errors = 0
        for _ in range(100):
            a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            h = (a + a.conj().T) / 2
            errors += LieService.is_hermitian(space, h) is not Verdict.YES
            errors += LieService.is_skew_hermitian(space, 1j * h) is not Verdict.YES
        assert errors == 0

    def test_hermitian_needs_complex_field(self, l2_2):
        with pytest.raises(CapabilityError):
            LieService.is_hermitian(l2_2, np.eye(2))

    def test_classify_report(self, linf_2):
        report = LieService.classify(linf_2, Operator.on(linf_2, J))
        assert report.skew_hermitian is Verdict.NO
        assert report.hermitian is None
        assert report.radius == pytest.approx(1)
        assert report.to_dict()["provenance"]["radius"] == "exact"


class TestSemigroup:
    def test_rotation_on_plane(self, l2_2):
        report = LieService.semigroup_verify(l2_2, J)
        assert report.max_drift <= 1e-12
        assert report.isometric is Verdict.YES
        assert report.rho_count == 201

    def test_rotation_on_square(self, linf_2):
        report = LieService.semigroup_verify(linf_2, J, rho_grid=[np.pi / 4])
        assert report.max_drift == pytest.approx(np.sqrt(2) - 1, abs=1e-12)
        assert report.isometric is Verdict.NO

    def test_zero_operator(self, hexagon):
        assert LieService.semigroup_verify(hexagon, np.zeros((2, 2))).max_drift == 0

    def test_large_radius_drifts(self, hexagon):
        rng = np.random.default_rng(21)
        checked = 0
        while checked < 10:
            T = OperatorService.random(hexagon, rng)
            if NumRangeService.radius(hexagon, T).value <= 0.1:
                continue
            checked += 1
            assert LieService.semigroup_verify(hexagon, T, rho_grid=np.linspace(-2, 2, 41)).max_drift > 0


class TestLieAlgebra:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_real_hilbert_dimension(self, n):
        report = LieService.lie_algebra_basis(SpaceService.lp(2, n), verify=n <= 3)
        assert report.dimension == n * (n - 1) // 2
        assert all(r <= 1e-9 for r in report.residuals)

    def test_complex_hilbert_dimension(self, cl2_2):
        assert LieService.lie_algebra_basis(cl2_2, verify=False).dimension == 4

    def test_l1_is_trivial(self, l1_3):
        report = LieService.lie_algebra_basis(l1_3)
        assert report.dimension == 0
        assert report.to_dict()["dimension"] == 0

    @pytest.mark.parametrize("space", [
        SpaceService.lp("inf", 2),
        SpaceService.polyhedral([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
        StructureService.l1_sum([SpaceService.lp("inf", 2), SpaceService.lp(1, 1)]),
    ])
    def test_pairs_and_auto_agree(self, space):
        auto = LieService.lie_algebra_basis(space, method=LieMethod.AUTO)
        pairs = LieService.lie_algebra_basis(space, method=LieMethod.PAIRS)
        assert auto.dimension == pairs.dimension == 0

    def test_rotation_of_l1_sum(self, l2_2):
        space = StructureService.l1_sum([l2_2, SpaceService.lp(1, 2)])
        report = LieService.lie_algebra_basis(space)
        assert report.dimension == 1
        expected = np.zeros((4, 4))
        expected[:2, :2] = J
        basis = report.basis[0]
        np.testing.assert_allclose(np.abs(basis), np.abs(expected) / np.sqrt(2), atol=1e-12)
        assert report.residuals[0] <= 1e-9

    def test_basis_maps_into_dual_algebra(self, l2_2):
        space = StructureService.l1_sum([l2_2, SpaceService.lp(1, 1)])
        for b in LieService.lie_algebra_basis(space, verify=False).basis:
            star = OperatorService.adjoint(Operator.on(space, b))
            assert NumRangeService.radius(star.domain, star).value <= 1e-9

    def test_smooth_lp_unsupported(self):
        with pytest.raises(CapabilityError):
            LieService.lie_algebra_basis(SpaceService.lp(3, 2))
