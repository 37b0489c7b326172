"""Partial-wave analysis of the two-dimensional Brown-Ravenhall operator
with Coulomb potential: channel kernels, Nystrom spectra, the positivity
certificate for the critical coupling and the unboundedness construction
above it.
"""

__version__ = "0.1.0"
