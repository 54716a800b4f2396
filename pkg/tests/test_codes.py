"""
Tests for fault_complex.codes — Base complexes and name parsing
=================================================================

Covers:
- Full-rank and cyclic repetition matrices
- Toric codes in 2, 3 and 4 dimensions
- Interval-product (surface) codes
- Code / repetition name parsing and its error paths
"""

import pytest

from fault_complex.chain import betti_numbers, min_weight_homology
from fault_complex.codes import (
    RepetitionSpec,
    ToricSpec,
    Variant,
    parse_code,
    parse_repetition,
    repetition,
    repetition_matrix,
    toric,
)
from fault_complex.errors import SpecError


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
#  Repetition codes
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

class TestRepetition:

    def test_full_rank_matrix(self):
        R = repetition_matrix(RepetitionSpec(3, Variant.FULL_RANK))
        assert R.shape == (2, 3)
        assert R.entries == [(0, 0), (0, 1), (1, 1), (1, 2)]

    def test_cyclic_matrix(self):
        R = repetition_matrix(RepetitionSpec(3, Variant.CYCLIC))
        assert R.shape == (3, 3)
        assert R.entries == [(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2)]

    def test_complex_grades(self):
        C = repetition(RepetitionSpec(4))
        assert C.dims == (4, 3)
        assert betti_numbers(C) == [0, 1]

    def test_single_bit_full_rank(self):
        R = repetition_matrix(RepetitionSpec(1))
        assert R.shape == (0, 1)

    def test_cyclic_needs_two_bits(self):
        with pytest.raises(SpecError):
            RepetitionSpec(1, Variant.CYCLIC)

    def test_delta_positive(self):
        with pytest.raises(SpecError):
            RepetitionSpec(0)

    def test_name(self):
        assert RepetitionSpec(5, Variant.CYCLIC).name == "rep:cyclic:5"
        assert RepetitionSpec(5).name == "rep:full:5"


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
#  Toric and surface codes
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

class TestToric:

    def test_2d(self):
        C = toric(ToricSpec(2, 3))
        assert C.dims == (9, 18, 9)
        assert betti_numbers(C) == [1, 2, 1]
        assert min_weight_homology(C, 1).weight == 3

    def test_3d(self):
        C = toric(ToricSpec(3, 2))
        assert C.dims == (8, 24, 24, 8)
        assert betti_numbers(C) == [1, 3, 3, 1]

    def test_4d(self):
        C = toric(ToricSpec(4, 2))
        assert C.dim(2) == 96
        assert betti_numbers(C) == [1, 4, 6, 4, 1]

    def test_valid_complexes(self):
        for dimension in (2, 3, 4):
            assert toric(ToricSpec(dimension, 2)).is_valid()

    def test_bad_dimension(self):
        with pytest.raises(SpecError):
            ToricSpec(5, 3)

    def test_bad_size(self):
        with pytest.raises(SpecError):
            ToricSpec(2, 1)


class TestSurface:

    def test_planar_code(self, surface_rs_3):
        assert surface_rs_3.dims == (6, 13, 6)
        assert betti_numbers(surface_rs_3) == [0, 1, 0]
        assert min_weight_homology(surface_rs_3, 1).weight == 3

    def test_periodic_axes_reproduce_toric(self):
        assert parse_code("surface:pp:3").complex == parse_code("toric:2:3").complex

    def test_too_many_axes(self):
        with pytest.raises(SpecError):
            parse_code("surface:rsrsr:3")

    def test_unknown_letter(self):
        with pytest.raises(SpecError):
            parse_code("surface:rx:3")


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
#  Name parsing
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

class TestParsing:

    def test_parse_repetition(self):
        spec = parse_repetition("rep:cyclic:4")
        assert spec.variant is Variant.CYCLIC
        assert spec.delta == 4
        assert parse_repetition("rep:full:2").variant is Variant.FULL_RANK

    def test_parse_repetition_errors(self):
        for name in ("rep:bogus:3", "rep:full:x", "rep:full", "toric:2:3"):
            with pytest.raises(SpecError):
                parse_repetition(name)

    def test_parse_toric(self):
        handle = parse_code("toric:3:2")
        assert handle.family == "toric"
        assert handle.qubit_grade == 2
        assert handle.size == 2
        assert handle.dimension == 3

    def test_parse_toric_2d_grade(self):
        assert parse_code("toric:2:3").qubit_grade == 1

    def test_parse_rep_as_base_code(self):
        handle = parse_code("rep:full:5")
        assert handle.qubit_grade == 1
        assert handle.complex.dims == (5, 4)

    def test_parse_surface(self):
        handle = parse_code("surface:rs:3")
        assert handle.name == "surface:rs:3"
        assert handle.dimension == 2

    def test_unknown_family(self):
        with pytest.raises(SpecError):
            parse_code("hypercube:3")

    def test_malformed_toric(self):
        with pytest.raises(SpecError):
            parse_code("toric:3")
        with pytest.raises(SpecError):
            parse_code("toric:two:3")
