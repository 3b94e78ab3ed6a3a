"""Composition arithmetic and mixture-spec validation."""
import numpy as np
import pytest

from msdiff import (Composition, DrivingForce, FluxSet, MixtureSpec,
                    mole_fractions, validate_spec)
from msdiff.errors import NegativeConcentration, NonPositiveTotal


class TestMoleFractions:
    def test_symmetric_pair(self):
        comp = mole_fractions([1.0, 1.0])
        assert np.array_equal(comp.x, [0.5, 0.5])
        assert comp.c_tot == 2.0

    def test_single_species_corner(self):
        comp = mole_fractions([2.0, 0.0, 0.0])
        assert np.array_equal(comp.x, [1.0, 0.0, 0.0])
        assert comp.c_tot == 2.0

    def test_direct_division(self):
        comp = mole_fractions([1.0, 2.0, 3.0])
        np.testing.assert_allclose(comp.x, [1 / 6, 1 / 3, 1 / 2], rtol=1e-15)
        assert comp.c_tot == 6.0

    def test_tiny_negative_clamped(self):
        comp = mole_fractions([1.0, -1e-12, 1.0])
        assert comp.x[1] == 0.0
        assert comp.c_tot == 2.0

    def test_large_negative_rejected(self):
        with pytest.raises(NegativeConcentration):
            mole_fractions([1.0, -1e-3])

    def test_zero_total_rejected(self):
        with pytest.raises(NonPositiveTotal):
            mole_fractions([0.0, 0.0])

    def test_scale_invariance(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            c = rng.uniform(0.1, 5.0, size=rng.integers(2, 7))
            alpha = 10.0 ** rng.uniform(-6, 6)
            x0 = mole_fractions(c).x
            x1 = mole_fractions(alpha * c).x
            np.testing.assert_allclose(x1, x0, atol=1e-14)

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            c = rng.uniform(0.0, 3.0, size=4)
            c[0] = max(c[0], 0.1)
            comp = mole_fractions(c)
            np.testing.assert_allclose(comp.x * comp.c_tot, c, rtol=1e-14)


class TestCompositionInvariants:
    def test_valid(self):
        Composition(x=[0.25, 0.75], c_tot=2.0)

    def test_sum_off_one(self):
        with pytest.raises(ValueError):
            Composition(x=[0.3, 0.6], c_tot=1.0)

    def test_negative_fraction(self):
        with pytest.raises(ValueError):
            Composition(x=[-0.1, 1.1], c_tot=1.0)

    def test_nonpositive_total(self):
        with pytest.raises(ValueError):
            Composition(x=[0.5, 0.5], c_tot=0.0)


class TestValidateSpec:
    def test_ok(self):
        spec = MixtureSpec(names=("A", "B"), dmat=[[0, 1], [1, 0]])
        assert validate_spec(spec) == []

    def test_asymmetric(self):
        spec = MixtureSpec(names=("A", "B"), dmat=[[0, 1], [2, 0]])
        codes = [i.code for i in validate_spec(spec)]
        assert "AsymmetricD" in codes

    def test_nonpositive(self):
        spec = MixtureSpec(names=("A", "B"), dmat=[[0, -1], [-1, 0]])
        codes = [i.code for i in validate_spec(spec)]
        assert "NonPositiveD" in codes

    def test_bad_dimension(self):
        spec = MixtureSpec(names=("A", "B", "C"), dmat=[[0, 1], [1, 0]])
        codes = [i.code for i in validate_spec(spec)]
        assert codes == ["BadDimension"]

    def test_reports_all_violations(self):
        spec = MixtureSpec(names=("A", "B"), dmat=[[0, -1], [2, 0]])
        codes = {i.code for i in validate_spec(spec)}
        assert {"AsymmetricD", "NonPositiveD"} <= codes


class TestZeroSumVectors:
    def test_driving_force_accepts_balanced(self):
        DrivingForce(d=[0.4, -0.1, -0.3])

    def test_driving_force_rejects_unbalanced(self):
        with pytest.raises(ValueError):
            DrivingForce(d=[0.4, -0.1, 0.0])

    def test_flux_set_rejects_unbalanced(self):
        with pytest.raises(ValueError):
            FluxSet(J=[1.0, 0.5])

    def test_zero_vectors_allowed(self):
        DrivingForce(d=[0.0, 0.0])
        FluxSet(J=[0.0, 0.0, 0.0])
