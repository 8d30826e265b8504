"""Entanglement dynamics of disordered Hamiltonians.

The package samples disordered Hamiltonian ensembles (a banded variant of the
quantum random energy model and the 3D Anderson model), diagonalizes them,
measures bipartite-entanglement statistics of mid-spectrum eigenstates, maps
ensemble parameters to a single complexity parameter Lambda, and compares the
measured statistics against closed-form evolution laws in Lambda.  An
independent stochastic oracle (a drifted random walk on the unit sphere and a
Langevin dynamics for Schmidt eigenvalues) validates the closed forms without
any diagonalization.
"""

from . import complexity, ensembles, entanglement, harness, oracle, spectral, theory

__all__ = [
    "complexity",
    "ensembles",
    "entanglement",
    "harness",
    "oracle",
    "spectral",
    "theory",
]

__version__ = "0.1.0"
