"""Desk-scale model of a HyperPlonk prover accelerator.

Functional kernels (field, curve, MLE, SumCheck, MSM, permutation pipeline,
prover) live next to the analytical hardware model in :mod:`zkspeed.perf`.
"""

__version__ = "0.1.0"
