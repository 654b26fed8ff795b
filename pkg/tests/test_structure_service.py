import numpy as np
import pytest

from daugavet.exceptions import DimensionMismatchError, PreconditionError
from daugavet.models.enums import ExtensionMode
from daugavet.models.operator import Operator
from daugavet.services.numrange_service import NumRangeService
from daugavet.services.operator_service import OperatorService
from daugavet.services.space_service import SpaceService
from daugavet.services.structure_service import StructureService
from tests.conftest import J


def turn(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def test_single_part_sum_is_the_part(l2_2):
    assert StructureService.l1_sum([l2_2]) is l2_2
    assert StructureService.linf_sum([l2_2]) is l2_2


def test_inject_and_project(l2_2, l1_3):
    space = StructureService.l1_sum([l2_2, l1_3])
    x = StructureService.inject(space, 1, [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(x, [0, 0, 1, 2, 3])
    np.testing.assert_array_equal(StructureService.project(space, 1, x), [1, 2, 3])
    with pytest.raises(DimensionMismatchError):
        StructureService.inject(space, 2, [1.0])


class TestExtendByZero:
    def test_norm_and_radius_preserved(self, l2_2, l1_3):
        S = Operator.on(l2_2, np.array([[1.0, 2.0], [0.0, 1.0]]))
        T = StructureService.extend_by_zero(S, l1_3)
        assert T.domain.dim == 5
        assert OperatorService.op_norm(T) == pytest.approx(OperatorService.op_norm(S), abs=1e-9)
        assert NumRangeService.radius(T.domain, T).value <= NumRangeService.radius(l2_2, S).value + 1e-9

    def test_provenance(self, l2_2, l1_3):
        T = StructureService.extend_by_zero(Operator.on(l2_2, J), l1_3)
        assert T.provenance["construction"] == "extend_by_zero"
        assert T.provenance["complement"] == l1_3.label

    def test_range_containment(self, l2_2):
        S = Operator.on(l2_2, np.array([[1.0, 1.0], [0.0, -0.5]]))
        report = StructureService.range_containment(S, SpaceService.lp(1, 2))
        assert report.holds
        assert report.max_violation <= 1e-8


class TestExtendIsometry:
    def test_rotation_extends(self, l2_2, l1_3):
        T = StructureService.extend_isometry(Operator.on(l2_2, turn(0.7)), l1_3)
        assert StructureService.sample_isometry(T) <= 1e-9

    def test_identity_extends(self, hexagon):
        T = StructureService.extend_isometry(Operator.on(hexagon, np.eye(2)), SpaceService.lp(1, 1))
        np.testing.assert_array_equal(T.matrix, np.eye(3))

    def test_non_isometry_rejected_with_witness(self, l2_2, l1_3):
        with pytest.raises(PreconditionError) as info:
            StructureService.extend_isometry(Operator.on(l2_2, np.diag([2.0, 1.0])), l1_3)
        np.testing.assert_allclose(info.value.witness, [1.0, 0.0])
        assert info.value.exit_code == 4


def test_extension_report(l2_2, l1_3):
    report = StructureService.extension_report(Operator.on(l2_2, J), l1_3, ExtensionMode.ISOMETRY)
    assert report.mode == "isometry"
    assert report.op_norm == pytest.approx(1.0)
    assert report.part_norm == pytest.approx(1.0)
    assert report.construction["construction"] == "extend_isometry"
