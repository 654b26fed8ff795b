import pytest

from daugavet.exceptions import CapabilityError
from daugavet.models.enums import EmbeddingKind
from daugavet.services.experiment_service import ExperimentService


class TestMainExample:
    def test_embedded_plane(self):
        report = ExperimentService.main_example_experiment(EmbeddingKind.L2_2, 1, [27], budget=8)
        assert report.assertions == {
            "m=27: dual model Lie dimension >= 1": True,
            "m=27: rotation drift <= 1e-9": True,
        }
        record = report.records[0]
        assert (record.m, record.dim_x, record.nodes) == (27, 10, 28)
        assert record.lie_dim_dual_model == 1
        assert record.dual_rotation_drift <= 1e-9
        assert 0.0 <= record.index_upper <= 1.0
        assert 0.0 <= record.daugavet_fraction <= 1.0
        assert record.bump_coverage_fraction == pytest.approx(8 / 28)

    def test_constants_report_only(self):
        report = ExperimentService.main_example_experiment(EmbeddingKind.CONSTANTS, 1, [27], budget=4)
        assert report.assertions == {}
        assert report.records[0].lie_dim_dual_model == 0
        assert report.csv_rows()[0]["kind"] == "constants"

    def test_other_kinds_rejected(self):
        with pytest.raises(CapabilityError):
            ExperimentService.main_example_experiment(EmbeddingKind.FULL, 1, [27])

    @pytest.mark.slow
    def test_fine_grids(self):
        report = ExperimentService.main_example_experiment(EmbeddingKind.L2_2, 1, [81, 243], budget=16)
        assert all(report.assertions.values())
        assert [r.dim_x for r in report.records] == [2 + 26, 2 + 80]


def test_dual_model_shape():
    model = ExperimentService.dual_model(EmbeddingKind.L2_2, 8)
    assert model.dim == 10
    assert model.is_sum


class TestDualModels:
    def test_dual_index_of_hexagon(self):
        report = ExperimentService.dual_index_experiment([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], m=3, budget=8)
        assert report.reference == pytest.approx(0.5, abs=1e-7)
        assert report.holds

    def test_hermitian_projections(self):
        report = ExperimentService.hermitian_model_experiment(count=6)
        assert report.holds
        assert report.value == 1.0
        assert report.members == 4

    def test_dissipative_projections(self):
        report = ExperimentService.dissipative_model_experiment(count=6)
        assert report.holds
        assert report.members == 3
