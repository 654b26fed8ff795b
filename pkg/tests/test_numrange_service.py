import numpy as np
import pytest

from daugavet.exceptions import CapabilityError
from daugavet.models.enums import Exactness, ScalarField
from daugavet.models.operator import Operator
from daugavet.services.numrange_service import NumRangeService
from daugavet.services.operator_service import OperatorService
from daugavet.services.space_service import SpaceService
from tests.conftest import J


class TestRangeSummary:
    def test_rotation_on_plane(self, l2_2):
        summary = NumRangeService.range_summary(l2_2, Operator.on(l2_2, J))
        assert summary.radius == pytest.approx(0, abs=1e-12)
        assert summary.sup_re == pytest.approx(0, abs=1e-12)
        assert summary.exact

    def test_rotation_on_square(self, linf_2):
        summary = NumRangeService.range_summary(linf_2, Operator.on(linf_2, J))
        assert summary.radius == pytest.approx(1)
        assert -1 in np.round(summary.samples, 12)
        assert summary.exact

    @pytest.mark.parametrize("space", [
        SpaceService.lp(1, 3),
        SpaceService.lp(2, 2, ScalarField.COMPLEX),
        SpaceService.polyhedral([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
    ])
    def test_identity(self, space):
        summary = NumRangeService.range_summary(space, OperatorService.identity(space))
        np.testing.assert_allclose(summary.samples, 1, atol=1e-9)
        assert summary.radius == pytest.approx(1)
        assert summary.sup_re == pytest.approx(1)

    def test_summary_invariants(self, hexagon):
        rng = np.random.default_rng(11)
        for _ in range(20):
            T = OperatorService.random(hexagon, rng)
            summary = NumRangeService.range_summary(hexagon, T)
            assert summary.radius >= max(abs(summary.sup_re), abs(summary.inf_re)) - 1e-9
            assert max(abs(z) for z in summary.samples) <= summary.radius + 1e-9
            assert summary.radius <= OperatorService.op_norm(T) + 1e-9

    def test_complex_rotation_radius(self, cl2_2):
        estimate = NumRangeService.radius(cl2_2, Operator.on(cl2_2, J))
        assert estimate.value == pytest.approx(1, abs=1e-9)

    def test_adjoint_has_same_radius(self, hexagon):
        rng = np.random.default_rng(12)
        for _ in range(20):
            T = OperatorService.random(hexagon, rng)
            star = OperatorService.adjoint(T)
            assert NumRangeService.radius(star.domain, star).value == pytest.approx(
                NumRangeService.radius(hexagon, T).value, abs=1e-9)

    def test_inf_re_mirrors_sup_re(self, l1_3):
        T = OperatorService.random(l1_3, np.random.default_rng(13))
        assert NumRangeService.inf_re(l1_3, T).value == pytest.approx(-NumRangeService.sup_re(l1_3, T.scaled(-1)).value)

    def test_large_sup_subspace_is_exact(self):
        rows = np.vstack([np.eye(14), np.ones((1, 14))])
        space = SpaceService.sup_subspace(tuple(range(15)), rows)
        T = OperatorService.random(space, np.random.default_rng(14))
        est = NumRangeService.sup_re(space, T)
        assert est.exactness is Exactness.EXACT
        x, f = est.witness, est.functional
        assert SpaceService.norm(space, x) == pytest.approx(1, abs=1e-9)
        assert np.real(np.vdot(f, T.matrix @ x)) == pytest.approx(est.value, abs=1e-9)


class TestExpFormula:
    def test_identity(self, hexagon):
        report = NumRangeService.exp_formula(hexagon, OperatorService.identity(hexagon))
        assert (report.lhs, report.mid, report.rhs) == pytest.approx((1, 1, 1), abs=1e-6)

    def test_rotation_on_plane(self, l2_2):
        report = NumRangeService.exp_formula(l2_2, Operator.on(l2_2, J))
        assert (report.lhs, report.mid, report.rhs) == pytest.approx((0, 0, 0), abs=1e-6)
        assert report.agree

    def test_rotation_on_square(self, linf_2):
        report = NumRangeService.exp_formula(linf_2, Operator.on(linf_2, J))
        assert report.agree
        assert report.lhs == pytest.approx(1)

    @pytest.mark.parametrize("seed", range(8))
    def test_three_way_agreement_l1(self, l1_3, seed):
        T = OperatorService.random(l1_3, np.random.default_rng(seed))
        report = NumRangeService.exp_formula(l1_3, T)
        assert report.agree
        assert len(report.mid_sequence) == 21

    @pytest.mark.slow
    @pytest.mark.parametrize("space", [SpaceService.lp(1, 3), SpaceService.lp("inf", 3), SpaceService.lp(2, 3)],
                             ids=["l1", "linf", "l2"])
    @pytest.mark.parametrize("seed", range(100))
    def test_three_way_agreement_full(self, space, seed):
        T = OperatorService.random(space, np.random.default_rng(seed))
        report = NumRangeService.exp_formula(space, T)
        assert abs(report.lhs - report.mid) <= 1e-6
        assert abs(report.lhs - report.rhs) <= 1e-6


class TestDaugavet:
    def test_identity(self, hexagon):
        report = NumRangeService.check_daugavet(hexagon, OperatorService.identity(hexagon))
        assert report.holds and report.range_criterion
        assert report.lhs == pytest.approx(2)

    def test_rotation_fails_on_plane(self, l2_2):
        report = NumRangeService.check_daugavet(l2_2, Operator.on(l2_2, J))
        assert not report.holds
        assert report.lhs == pytest.approx(np.sqrt(2))
        assert report.consistent

    def test_coordinate_projection_on_square(self, linf_2):
        report = NumRangeService.check_daugavet(linf_2, Operator.on(linf_2, np.diag([1.0, 0.0])))
        assert report.holds and report.range_criterion
        assert report.sup_re == pytest.approx(1)

    def test_zero_is_degenerate(self, l1_2):
        report = NumRangeService.check_daugavet(l1_2, Operator.on(l1_2, np.zeros((2, 2))))
        assert report.holds and report.degenerate

    def test_criterion_agrees_on_random_operators(self, hexagon):
        rng = np.random.default_rng(15)
        for _ in range(30):
            assert NumRangeService.check_daugavet(hexagon, OperatorService.random(hexagon, rng)).consistent

    @pytest.mark.slow
    def test_criterion_and_circle_on_thousand_operators(self):
        spaces = [SpaceService.lp(1, 3), SpaceService.lp("inf", 3), SpaceService.lp(1, 2),
                  SpaceService.polyhedral([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])]
        rng = np.random.default_rng(17)
        disagreements = violations = 0
        for k in range(1000):
            space = spaces[k % len(spaces)]
            T = OperatorService.random(space, rng)
            if k % 5 == 0:
                # rank-one, onto a vertex
                vertices = SpaceService.extreme_points(space)
                vertex = vertices[rng.integers(len(vertices))]
                T = Operator.on(space, np.outer(vertex, rng.uniform(-1, 1, space.dim)))
            disagreements += not NumRangeService.check_daugavet(space, T, tol=1e-8).consistent
            violations += NumRangeService.daugavet_circle_check(space, T, [1, -1], tol=1e-8).counterexamples
        assert disagreements == 0
        assert violations == 0


class TestCircle:
    def test_identity(self, l1_2):
        report = NumRangeService.daugavet_circle_check(l1_2, OperatorService.identity(l1_2), [1])
        assert report.instances[0].equation_holds and report.instances[0].verified

    def test_negative_projection(self, linf_2):
        T = Operator.on(linf_2, np.diag([-1.0, 0.0]))
        report = NumRangeService.daugavet_circle_check(linf_2, T, [-1])
        assert report.instances[0].equation_holds
        assert report.counterexamples == 0

    def test_rotated_identity(self, cl2_2):
        lam = np.exp(0.7j)
        T = Operator.on(cl2_2, np.conj(lam) * np.eye(2))
        report = NumRangeService.daugavet_circle_check(cl2_2, T, [lam, 1])
        holding, failing = report.instances
        assert holding.equation_holds and holding.verified
        assert holding.distance == pytest.approx(0, abs=1e-9)
        assert not failing.equation_holds

    def test_shortfall_is_measured(self, l2_2):
        # ||Id + T|| - 1 - ||T|| is about -2.5e-3 while sup Re V(T) = 1.1 < ||T||
        T = Operator.on(l2_2, np.array([[1.0, 0.2], [0.0, 1.0]]))
        report = NumRangeService.daugavet_circle_check(l2_2, T, [1], tol=4e-3)
        instance = report.instances[0]
        assert instance.equation_holds
        assert instance.distance == pytest.approx(np.linalg.norm(T.matrix, 2) - 1.1, abs=1e-9)
        assert instance.distance > 4e-3
        assert not instance.verified
        assert report.counterexamples == 1

    def test_random_sweep(self, l1_3):
        rng = np.random.default_rng(16)
        for _ in range(40):
            report = NumRangeService.daugavet_circle_check(l1_3, OperatorService.random(l1_3, rng), [1, -1])
            assert report.counterexamples == 0

    def test_complex_scalar_on_real_space(self, l1_2):
        with pytest.raises(CapabilityError):
            NumRangeService.daugavet_circle_check(l1_2, OperatorService.identity(l1_2), [1j])

    def test_non_unimodular(self, cl2_2):
        with pytest.raises(CapabilityError):
            NumRangeService.daugavet_circle_check(cl2_2, OperatorService.identity(cl2_2), [0.5])

    def test_csv_rows(self, l1_2):
        report = NumRangeService.daugavet_circle_check(l1_2, OperatorService.identity(l1_2), [1, -1])
        assert len(report.csv_rows()) == 2
