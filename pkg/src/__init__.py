"""
NetKit: Linear Network Analysis Toolkit
Admittance matrices, cofactor identities, Kirchhoff characteristics and
positive-real impedance tests for linear electrical networks.
"""

__version__ = "0.1.0"
__author__ = "Aditi Kulkarni"
