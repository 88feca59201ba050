"""Clenshaw-Curtis-Filon quadrature for singular oscillatory Bessel transforms."""
