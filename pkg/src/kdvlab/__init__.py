"""Numerical laboratory for the KdV equation on a finite interval with
Colin-Ghidaglia boundary conditions u(0)=h1, u_x(L)=h2, u_xx(L)=h3."""

__version__ = "0.1.0"
