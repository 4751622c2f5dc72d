"""Exact-arithmetic workbench for GL_n(F_q) character sums.

Computes characters, Bessel and Bessel-Speh functions, Godement-Jacquet
and Bessel-Speh-kernel gamma factors, twisted matrix Kloosterman sums, and
zeta-operator functional equations over small finite fields, with every
value kept exactly in Q(zeta_m)[sqrt(q)].
"""

__version__ = "0.1.0"
