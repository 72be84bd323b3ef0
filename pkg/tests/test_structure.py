import numpy as np
import pytest

from conftest import (
    random_circulant_bistochastic,
    random_commuting_contractions,
    random_commuting_unitaries,
)
from dilations.linalg import InputError, identity
from dilations.structure import bimarkov_check, preservation_suite, structure_report


def shift_matrix(n):
    s = np.zeros((n, n), dtype=complex)
    for m in range(n):
        s[(m + 1) % n, m] = 1.0
    return s


class TestStructureReport:
    def test_identity_is_everything(self):
        report = structure_report(identity(3))
        assert report.is_contraction
        assert report.is_isometry
        assert report.is_unitary
        assert report.is_projection
        assert report.is_entrywise_nonneg
        assert report.is_bimarkov

    def test_permutation(self):
        report = structure_report(shift_matrix(4))
        assert report.is_unitary
        assert report.is_bimarkov
        assert not report.is_projection

    def test_nilpotent(self):
        e21 = np.zeros((2, 2), dtype=complex)
        e21[1, 0] = 1.0
        report = structure_report(e21)
        assert report.is_contraction
        assert not report.is_isometry
        assert not report.preserves_unity

    def test_projection_flags(self):
        report = structure_report(np.diag([1.0, 0.0]))
        assert report.is_projection
        assert report.is_contraction
        assert not report.is_isometry

    def test_isometry_vs_unitary_square(self):
        # A square isometry is unitary; report flags agree.
        report = structure_report(shift_matrix(3))
        assert report.is_isometry == report.is_unitary

    def test_deviation_values(self):
        report = structure_report(1.5 * identity(2))
        assert report.deviations["is_contraction"] == pytest.approx(0.5)
        assert not report.is_contraction

    def test_complex_entries_break_nonnegativity(self):
        report = structure_report(np.array([[1j, 0], [0, 1]]))
        assert not report.is_entrywise_nonneg

    def test_rejects_non_square(self):
        with pytest.raises(InputError):
            structure_report(np.ones((2, 3)))

    def test_json_shape(self):
        payload = structure_report(identity(2)).to_json()
        assert set(payload) == {"flags", "deviations"}
        assert payload["flags"]["is_unitary"] is True


class TestBimarkov:
    def test_doubly_stochastic(self):
        a = np.array([[0.5, 0.5], [0.5, 0.5]])
        assert bimarkov_check(a)

    def test_row_stochastic_only(self):
        a = np.array([[0.5, 0.5], [0.0, 1.0]])
        assert not bimarkov_check(a)

    def test_negative_entry(self):
        a = np.array([[1.5, -0.5], [-0.5, 1.5]])
        assert not bimarkov_check(a)

    def test_random_circulant_family(self):
        rng = np.random.default_rng(60)
        tup = random_circulant_bistochastic(rng, 2, 4)
        for m in tup.mats:
            assert bimarkov_check(m, tol=1e-12)


class TestPreservationSuite:
    def test_unitary_base(self):
        rng = np.random.default_rng(61)
        tup = random_commuting_unitaries(rng, 2, 2)
        out = preservation_suite(tup, 2, tol=1e-9)
        assert out["passed"]
        assert out["classes"]["unitary"]["base_holds"]
        assert out["classes"]["unitary"]["preserved"]
        assert out["classes"]["isometry"]["preserved"]

    def test_bimarkov_base(self):
        rng = np.random.default_rng(62)
        tup = random_circulant_bistochastic(rng, 1, 3)
        out = preservation_suite(tup, 3, tol=1e-9)
        assert out["passed"]
        assert out["classes"]["bimarkov"]["preserved"]
        assert out["classes"]["entrywise_nonneg"]["preserved"]

    def test_generic_base_skips_classes(self):
        rng = np.random.default_rng(63)
        tup = random_commuting_contractions(rng, 1, 2)
        out = preservation_suite(tup, 2, tol=1e-9)
        assert out["passed"]
        assert out["classes"]["unitary"]["base_holds"] is False
        assert out["classes"]["unitary"]["preserved"] is None

    def test_converse_unit_times(self):
        rng = np.random.default_rng(64)
        tup = random_commuting_unitaries(rng, 2, 2)
        out = preservation_suite(tup, 2, tol=1e-9)
        assert all(item["matches"] for item in out["converse_unit_times"])

    def test_explicit_times(self):
        from dilations.interpolation import ContractionTuple
        from dilations.torus import GridTime

        tup = ContractionTuple((shift_matrix(3),))
        out = preservation_suite(
            tup, 2, times=[GridTime(2, (1,)), GridTime(2, (3,))], tol=1e-10
        )
        assert out["times"] == ["1/2", "3/2"]
        assert out["passed"]
