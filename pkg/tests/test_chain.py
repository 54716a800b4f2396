"""
Tests for fault_complex.chain — Chain complexes and homology
==============================================================

Covers:
- Construction, grade accessors and off-the-end zero maps
- Validation: dimension and chain-condition violations
- Homology / cohomology bases and Betti numbers
- Minimum-weight representatives (exact and randomized)
- Dual, subcomplex and serialization
"""

import math

import pytest

from fault_complex.chain import (
    ChainComplex,
    betti_numbers,
    cohomology,
    homology,
    homology_dimension,
    min_weight_cohomology,
    min_weight_homology,
    validate,
)
from fault_complex.errors import InvalidComplexError, SpecError
from fault_complex.gf2 import BinMatrix


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
#  Construction and validation
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

class TestConstruction:

    def test_dims_are_highest_grade_first(self, rep_full_3):
        assert rep_full_3.dims == (3, 2)
        assert rep_full_3.dim(1) == 3
        assert rep_full_3.dim(0) == 2
        assert rep_full_3.length == 1

    def test_boundary_outside_range_is_zero(self, rep_full_3):
        assert rep_full_3.boundary(2).shape == (3, 0)
        assert rep_full_3.boundary(0).shape == (0, 2)
        assert rep_full_3.dim(5) == 0

    def test_wrong_number_of_dims(self):
        with pytest.raises(SpecError):
            ChainComplex([1, 1, 1], [BinMatrix([[1]])])

    def test_negative_dim(self):
        with pytest.raises(SpecError):
            ChainComplex([-1], [])


class TestValidation:

    def test_valid(self, toric2d_3):
        assert toric2d_3.is_valid()
        assert validate(toric2d_3) is None

    def test_dimension_violation(self):
        C = ChainComplex([2, 3], [BinMatrix.identity(2)])
        report = validate(C)
        assert report.kind == "dimension"
        assert report.grade == 1
        with pytest.raises(InvalidComplexError):
            C.check()

    def test_chain_violation_location(self):
        C = ChainComplex([1, 1, 1], [BinMatrix([[1]]), BinMatrix([[1]])])
        with pytest.raises(InvalidComplexError) as exc_info:
            C.check()
        assert exc_info.value.location == (1, 0, 0)

    def test_homology_of_invalid_complex_raises(self):
        C = ChainComplex([1, 1, 1], [BinMatrix([[1]]), BinMatrix([[1]])])
        with pytest.raises(InvalidComplexError):
            homology(C, 1)


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
#  Homology
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

class TestHomology:

    def test_full_rank_repetition(self, rep_full_3):
        assert homology(rep_full_3, 1).dimension == 1
        assert homology(rep_full_3, 0).dimension == 0
        assert cohomology(rep_full_3, 1).dimension == 1
        assert cohomology(rep_full_3, 0).dimension == 0

    def test_cyclic_repetition(self, rep_cyclic_3):
        for grade in (0, 1):
            assert homology(rep_cyclic_3, grade).dimension == 1
            assert cohomology(rep_cyclic_3, grade).dimension == 1

    def test_toric_betti(self, toric2d_3):
        assert toric2d_3.dims == (9, 18, 9)
        assert betti_numbers(toric2d_3) == [1, 2, 1]

    def test_homology_dimension_matches_basis(self, toric2d_3):
        for grade in range(3):
            assert homology_dimension(toric2d_3, grade) == homology(toric2d_3, grade).dimension

    def test_representatives_are_cycles(self, toric2d_3):
        for v in homology(toric2d_3, 1).representatives:
            assert (toric2d_3.boundary(1) @ v).is_zero()
        for v in cohomology(toric2d_3, 1).representatives:
            assert (toric2d_3.boundary(2).T @ v).is_zero()

    def test_grade_out_of_range(self, toric2d_3):
        with pytest.raises(SpecError):
            homology(toric2d_3, 3)


class TestMinWeight:

    def test_repetition_distance(self, rep_full_3):
        result = min_weight_homology(rep_full_3, 1)
        assert result.weight == 3
        assert result.exact
        assert result.witness.weight == 3

    def test_trivial_homology_is_infinite(self, rep_full_3):
        result = min_weight_homology(rep_full_3, 0)
        assert result.is_infinite
        assert math.isinf(result.weight)
        assert result.witness is None
        assert result.exact

    def test_cyclic_cohomology(self, rep_cyclic_3):
        assert min_weight_cohomology(rep_cyclic_3, 0).weight == 3
        assert min_weight_cohomology(rep_cyclic_3, 1).weight == 1
        assert min_weight_homology(rep_cyclic_3, 0).weight == 1

    def test_toric_distance(self, toric2d_3):
        assert min_weight_homology(toric2d_3, 1).weight == 3
        assert min_weight_cohomology(toric2d_3, 1).weight == 3

    def test_witness_is_nontrivial_cycle(self, toric2d_3):
        result = min_weight_homology(toric2d_3, 1)
        assert (toric2d_3.boundary(1) @ result.witness).is_zero()
        assert any(g.dot(result.witness) for g in cohomology(toric2d_3, 1).representatives)

    def test_randomized_search_is_upper_bound(self, toric2d_3):
        first = min_weight_homology(toric2d_3, 1, cutoff=0, seed=5, attempts=200)
        again = min_weight_homology(toric2d_3, 1, cutoff=0, seed=5, attempts=200)
        assert not first.exact
        assert first.weight >= 3
        assert first.weight == again.weight


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
#  Derived complexes and serialization
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

class TestDerived:

    def test_dual_reverses(self, rep_full_3):
        D = rep_full_3.dual()
        assert D.dims == (2, 3)
        assert D.boundary(1) == rep_full_3.boundary(1).T

    def test_dual_swaps_homology_and_cohomology(self, toric2d_3):
        D = toric2d_3.dual()
        assert betti_numbers(D) == list(reversed(betti_numbers(toric2d_3)))

    def test_subcomplex(self, toric2d_3):
        S = toric2d_3.subcomplex(1, 2)
        assert S.dims == (9, 18)
        assert S.boundary(1) == toric2d_3.boundary(2)

    def test_subcomplex_out_of_range(self, toric2d_3):
        with pytest.raises(SpecError):
            toric2d_3.subcomplex(1, 3)

    def test_dict_round_trip(self, toric2d_3):
        assert ChainComplex.from_dict(toric2d_3.to_dict()) == toric2d_3

    def test_from_dict_malformed(self):
        with pytest.raises(SpecError):
            ChainComplex.from_dict({"dims": [1]})
