"""Projected dynamical systems: simulation and regularity diagnostics.

Thin wrapper over the C++ extension module. The extension lives inside the
package in wheel installs and at the top level in build trees.
"""

try:
    from ._pdsim import (
        detect_equilibrium,
        equivalence_residual,
        invariance_harness,
        moreau_check,
        one_sided_lipschitz,
        project,
        prox_estimate,
        scenario_config,
        scenario_names,
        simulate,
        uniqueness_probe,
        verify,
    )
except ImportError:  # build-tree layout
    from _pdsim import (
        detect_equilibrium,
        equivalence_residual,
        invariance_harness,
        moreau_check,
        one_sided_lipschitz,
        project,
        prox_estimate,
        scenario_config,
        scenario_names,
        simulate,
        uniqueness_probe,
        verify,
    )

__all__ = [
    "detect_equilibrium",
    "equivalence_residual",
    "invariance_harness",
    "moreau_check",
    "one_sided_lipschitz",
    "project",
    "prox_estimate",
    "scenario_config",
    "scenario_names",
    "simulate",
    "uniqueness_probe",
    "verify",
]
