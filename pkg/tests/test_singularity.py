"""Tests for singularity module"""

import pytest
from sympy import Rational

from torsion_asymptotics.errors import SingularityError
from torsion_asymptotics.singularity import (
    BrieskornPham,
    Explicit,
    NewtonConvenient,
    QuasiHomogeneous,
    Spectrum,
    brieskorn_pham_degree_bound,
    kouchnirenko,
    macaulay_local_dimension,
    macaulay_milnor,
    milnor,
    milnor_orlik,
    monodromy_eigenvalues,
    partials_of,
    spectral_genus,
    spectrum,
)

GERMS = [(2, 2), (2, 3), (3, 4), (2, 5), (2, 2, 2), (2, 3, 4), (3, 3, 3)]


class TestMilnorNumber:
    @pytest.mark.parametrize("exponents", GERMS)
    def test_backends_agree_on_brieskorn_pham(self, exponents):
        g = BrieskornPham(exponents)
        mu = milnor(g)

        assert milnor_orlik(g.weights) == mu
        assert kouchnirenko(g.newton_vertices()) == mu
        assert macaulay_milnor(partials_of(g), g.nvars, brieskorn_pham_degree_bound(g)) == mu

    def test_brieskorn_pham_closed_form(self):
        assert milnor(BrieskornPham((3, 4))) == 6
        assert milnor(BrieskornPham((2, 2, 2, 2))) == 1

    def test_kouchnirenko_cusp(self):
        assert milnor(NewtonConvenient(((2, 0), (0, 3)))) == 2

    def test_kouchnirenko_with_interior_vertex(self):
        # x^4 + xy + y^4 is a node
        assert kouchnirenko([(4, 0), (1, 1), (0, 4)]) == 1

    def test_explicit_node(self):
        assert milnor(Explicit("x**4 + x*y + y**4", ("x", "y"))) == 1

    def test_explicit_matches_quasi_homogeneous(self):
        g = Explicit("x**3 + y**4", ("x", "y"))
        assert milnor(g) == milnor(QuasiHomogeneous((Rational(1, 3), Rational(1, 4)), (((3, 0), 1), ((0, 4), 1))))

    @pytest.mark.parametrize("degree, expected", [(1, 1), (2, 2), (4, 2), (7, 2)])
    def test_macaulay_local_dimension_stabilises(self, degree, expected):
        # partials of x^2 + y^3
        partials = [{(1, 0): Rational(2)}, {(0, 2): Rational(3)}]

        assert macaulay_local_dimension(partials, 2, degree) == expected

    def test_macaulay_without_generators_counts_monomials(self):
        assert macaulay_local_dimension([], 2, 3) == 6

    def test_non_isolated_is_rejected(self):
        with pytest.raises(SingularityError, match="not isolated"):
            milnor(Explicit("x**2", ("x", "y")))

    def test_non_integral_milnor_orlik(self):
        with pytest.raises(SingularityError):
            milnor_orlik((Rational(1, 2), Rational(2, 5)))


class TestSpectrum:
    def test_cusp(self):
        sp = spectrum(BrieskornPham((2, 3)))

        assert sp.entries == (Rational(5, 6), Rational(7, 6))
        assert sp.is_symmetric()

    @pytest.mark.parametrize("exponents", GERMS)
    def test_size_and_symmetry(self, exponents):
        g = BrieskornPham(exponents)
        sp = spectrum(g)

        assert len(sp) == milnor(g)
        assert sp.is_symmetric()
        assert all(0 < a < g.n + 1 for a in sp.entries)

    def test_quasi_homogeneous_route_matches(self):
        g = QuasiHomogeneous((Rational(1, 3), Rational(1, 4)), (((3, 0), 1), ((0, 4), 1)))

        assert spectrum(g) == spectrum(BrieskornPham((3, 4)))

    def test_unsupported_germ(self):
        with pytest.raises(SingularityError):
            spectrum(NewtonConvenient(((2, 0), (0, 3))))

    def test_spectrum_sorts_entries(self):
        assert Spectrum(1, (Rational(7, 6), Rational(5, 6))).entries == (Rational(5, 6), Rational(7, 6))


class TestSpectralGenus:
    @pytest.mark.parametrize(
        "exponents, expected",
        [((2, 2), 0), ((2, 3), Rational(1, 6)), ((2, 4), Rational(1, 4)), ((3, 3), Rational(1, 3))],
    )
    def test_steenbrink_convention(self, exponents, expected):
        assert spectral_genus(BrieskornPham(exponents)) == expected

    def test_alt_convention(self):
        assert spectral_genus(BrieskornPham((2, 3)), "alt") == Rational(5, 6)

    def test_unknown_convention(self):
        with pytest.raises(SingularityError):
            spectral_genus(BrieskornPham((2, 3)), "hodge")

    def test_monodromy_eigenvalues(self):
        assert monodromy_eigenvalues(BrieskornPham((2, 3))) == (Rational(1, 6), Rational(5, 6))


class TestValidation:
    @pytest.mark.parametrize("exponents", [(), (1, 3), (2, 0)])
    def test_brieskorn_pham(self, exponents):
        with pytest.raises(SingularityError):
            BrieskornPham(exponents)

    def test_weights_out_of_range(self):
        with pytest.raises(SingularityError):
            QuasiHomogeneous((Rational(3, 5), Rational(1, 3)), ())

    def test_monomial_of_wrong_degree(self):
        with pytest.raises(SingularityError, match="weighted degree"):
            QuasiHomogeneous((Rational(1, 2), Rational(1, 3)), (((2, 0), 1), ((0, 2), 1)))

    def test_non_convenient_diagram(self):
        with pytest.raises(SingularityError, match="axis 1"):
            NewtonConvenient(((2, 0), (1, 1)))

    def test_unreadable_polynomial(self):
        with pytest.raises(SingularityError):
            Explicit("x**2 + sin(y)", ("x", "y"))
