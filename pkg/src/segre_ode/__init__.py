"""Singular second-order ODEs attached to nonminimal real hypersurfaces in C^2.

Submodules:

- ``series``: truncated Laurent series over complex doubles
- ``hypersurface``: prenormal hypersurface data and the associated ODE
- ``ode``: relation checks, Fuchsian classification, reduction, verdicts
- ``bbsolver``: formal solutions of Briot-Bouquet type equations
- ``numint``: path integration, monodromy, growth, associated maps
- ``linalg3``: 3x3 centralizer dimensions
- ``cli``: the ``segre-ode`` command line
"""

from .bbsolver import BBSystem, FormalSolution, choose_base_root, formal_solve, linearize, residual
from .hypersurface import P0Hypersurface, associate_ode, recover_hypersurface, validate_hypersurface
from .linalg3 import centralizer_dim, hol_dim_bound
from .numint import (GrowthReport, MonodromyReport, PathSpec, associated_map_linear,
                     growth_exponent, integrate_path, monodromy_linear, monodromy_probe,
                     segre_residual)
from .ode import (NonminimalODE, ReducedODE, check_relations, extension_verdict, fuchsian_test,
                  ode_from_map, reduce)
from .series import TruncatedSeries, conjugate_bar, differentiate, evaluate, ord0

__version__ = "0.1.0"

__all__ = [
    "TruncatedSeries", "conjugate_bar", "differentiate", "evaluate", "ord0",
    "P0Hypersurface", "associate_ode", "recover_hypersurface", "validate_hypersurface",
    "NonminimalODE", "ReducedODE", "check_relations", "extension_verdict", "fuchsian_test",
    "ode_from_map", "reduce",
    "BBSystem", "FormalSolution", "choose_base_root", "formal_solve", "linearize", "residual",
    "GrowthReport", "MonodromyReport", "PathSpec", "associated_map_linear", "growth_exponent",
    "integrate_path", "monodromy_linear", "monodromy_probe", "segre_residual",
    "centralizer_dim", "hol_dim_bound",
]
