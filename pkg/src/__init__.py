"""Commute-network modeling pipeline."""
