"""chflow: a flow-map laboratory for Camassa-Holm type equations.

Lagrangian characteristics solver with linear-time exponential-kernel
convolutions, an independent pseudospectral reference solver plus a Picard
iteration scheme, Littlewood-Paley/Besov diagnostics, multipeakon oracles,
and scripted stability experiments.
"""

__version__ = "0.1.0"
