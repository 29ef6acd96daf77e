"""Property (FA) for wreath products: presentations, abelian invariants,
permutation groups, tree actions, Bass-Serre trees and a verdict engine."""

__version__ = "0.1.0"
