"""
ruelle: continuous-time Ruelle transfer operators for finite Markov chains.
"""

__version__ = "0.1.0"
