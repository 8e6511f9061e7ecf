"""
Simulation of sequential logit passing for networked binary classification
on agent DAGs, with the tooling to check its loss bounds numerically
"""
__version__ = "1.0"
