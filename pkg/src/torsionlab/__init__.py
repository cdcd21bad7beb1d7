"""Twisted Reidemeister torsion of knot exteriors, Dehn fillings and their asymptotics."""

__version__ = "0.1.0"
