"""Zero-free regions of lattice-gas partition functions: exact sums, criteria,
recursions and the Kirkwood-Salsburg hierarchy on finite lattices."""

from latgas._backend import BACKEND
from latgas.errors import (DegreeExceeded, DepthGuardExceeded, EdgeNotIncident, LatgasError,
                           MissingPotential, ModelError, NoConvergence, SupportTooSmall,
                           VanishingDenominator)
from latgas.exact import PartitionQuery, Z, correlation, effective_activity, partition_function
from latgas.hypergraph import Hypergraph, independence_polynomial, polydisc_scan
from latgas.ks import CorrelationTable, mu_recover, picard_solve
from latgas.model import (CriterionParams, InteractionModel, conditioned, kappa_conditional,
                          w_conditional)
from latgas.recursion import recursive_effective_activity

__all__ = [
    "BACKEND", "CorrelationTable", "CriterionParams", "DegreeExceeded", "DepthGuardExceeded",
    "EdgeNotIncident", "Hypergraph", "InteractionModel", "LatgasError", "MissingPotential",
    "ModelError", "NoConvergence", "PartitionQuery", "SupportTooSmall", "VanishingDenominator",
    "Z", "conditioned", "correlation", "effective_activity", "independence_polynomial",
    "kappa_conditional", "mu_recover", "partition_function", "picard_solve", "polydisc_scan",
    "recursive_effective_activity", "w_conditional",
]
