"""Decomposition of free bigraded chain complexes over F[U,V]/(UV).

The package splits such a complex into its unique direct sum of snake
complexes, local systems and zero complexes, and computes the derived
invariants (torsion orders, homology type, symmetry, essential
infiniteness, simplified-basis obstruction).
"""

__version__ = "0.1.0"
