"""Spectral data of Zakharov-Shabat operators on [0, 1]."""
