"""Exact generalized probabilistic theories: cloning, broadcasting and their fixed points."""
