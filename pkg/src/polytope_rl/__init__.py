"""Derivative-free policy search for cart-pole with the Nelder-Mead polytope method."""
