"""Density-matrix simulation of deleting, cloning and erasure machines acting on
shared singlets, and whether they let Alice signal to Bob."""

__version__ = "0.1.0"
