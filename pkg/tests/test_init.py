"""
Tests for fault_complex.__init__ — Module exports
===================================================

Verifies that the package's public API is correctly exported.
"""


class TestModuleExports:

    def test_version(self):
        import fault_complex
        assert fault_complex.__version__ == "0.3.0"

    def test_author(self):
        import fault_complex
        assert fault_complex.__author__ == "Fault Complex Toolkit Developers"

    def test_license(self):
        import fault_complex
        assert fault_complex.__license__ == "MIT"

    def test_exports_algebra(self):
        from fault_complex import BinMatrix, BinVector, ChainComplex, betti_numbers
        assert BinMatrix is not None
        assert BinVector is not None
        assert ChainComplex is not None
        assert callable(betti_numbers)

    def test_exports_builders(self):
        from fault_complex import parse_code, parse_repetition, product, repetition
        assert callable(parse_code)
        assert callable(parse_repetition)
        assert callable(product)
        assert callable(repetition)

    def test_exports_pipeline(self):
        from fault_complex import ExperimentSpec, FitInput, decode, fit_threshold, run_memory
        assert ExperimentSpec is not None
        assert FitInput is not None
        assert callable(decode)
        assert callable(run_memory)
        assert callable(fit_threshold)

    def test_all_names_resolve(self):
        import fault_complex
        for name in fault_complex.__all__:
            assert hasattr(fault_complex, name), name

    def test_quick_start(self):
        from fault_complex import parse_code, parse_repetition, product, repetition

        code = parse_code("toric:2:3")
        F = product(repetition(parse_repetition("rep:full:3")), code.complex, code.qubit_grade)
        assert (F.d_primal, F.d_dual) == (3, 3)
