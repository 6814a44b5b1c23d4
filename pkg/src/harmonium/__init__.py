"""Harmonic-grammar optimization toolkit.

Submodules:

* :mod:`harmonium.fock` -- role/filler basis states and binding operators
* :mod:`harmonium.grammar` -- harmony functions, built-in grammars, exact DP
* :mod:`harmonium.annealer` -- Potts-style simulated annealing
* :mod:`harmonium.trees` -- parse-tree enumeration, morphing, random baselines
* :mod:`harmonium.quantum` -- dense Harmony operators, spectra, circuit families
* :mod:`harmonium.qbm` -- Boltzmann-machine training of Harmony models
* :mod:`harmonium.cli` -- experiment drivers with deterministic CSV output
"""

__version__ = "0.1.0"
