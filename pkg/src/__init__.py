"""
kdvfactor - Factorization of Schrodinger operators with stationary KdV potentials
"""

__version__ = "1.0.0"
__author__ = "Erik Bitzek"
