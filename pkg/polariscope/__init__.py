"""
polariscope - simulation and analysis of dye-microcavity polariton spectra
"""

__version__ = "1.0.0"
__author__ = "polariscope developers"
