"""
gls-normal

Construction and checking of numbers that are normal with respect to a
generalized Lüroth series (GLS), built from a uniformly distributed sequence.
"""

__version__ = '0.1.0'
