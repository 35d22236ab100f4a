"""Exact spectral analysis of the Metropolis random-transposition chain on partitions.

The chain targets the Ewens distribution with parameter 1/theta and is
diagonalized by Jack polynomials in the power-sum basis.
"""

__version__ = "0.1.0"
