"""Simulation of RIS-generated correlated multipath against MUSIC direction finding."""

__version__ = "0.1.0"
