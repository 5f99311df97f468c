"""Spectral Navier-Stokes solver on the n-torus, with majorant-based existence certificates and analyticity diagnostics."""
