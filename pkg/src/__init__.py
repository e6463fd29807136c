"""
MAVE-BO: Bayesian optimization in an estimated effective dimension-reduction subspace.
"""
