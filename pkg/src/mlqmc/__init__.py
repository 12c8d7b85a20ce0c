"""Multilevel quasi-Monte Carlo integration with fast orthogonal transforms."""
