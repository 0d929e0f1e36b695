"""Exact q-expansion toolkit for elliptic cohomology computations.

Submodules
----------
series       exact truncated power/Laurent series and multivariate companions
modforms     lattices, Eisenstein series, weight checks
sigma        the canonical odd elliptic function, its group law, completion
fermion      regularized fermionic Pfaffians and loop-space characters
euler        twisted Euler classes with nilpotent Chern roots
equivderham  Weil/Cartan models for compact group actions
sheafmodel   fixed loci, twisted local sections, finite-group sectors
cli          command-line entry point
"""

__version__ = "0.1.0"
