"""Planar bar-joint linkage toolkit.

Numeric coupler-curve tracing, exact locus equations by polynomial
elimination, straightness certificates, and LEGO part lists for a small
catalog of classical straight-line mechanisms.
"""

__version__ = "0.1.0"
