"""Arithmetic fractional Fourier transform on qudits: modular arithmetic,
SL2(Z_N) tools, Weil-representation matrices, circuit synthesis and a
statevector simulator."""

__version__ = "0.1.0"
