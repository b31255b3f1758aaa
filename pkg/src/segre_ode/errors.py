"""Exception and warning types.

Every error carries the name of the violated precondition so that the CLI
can report it verbatim.
"""


class SegreODEError(Exception):
    precondition = "unspecified"

    def __init__(self, message="", precondition=None):
        super().__init__(message)
        if precondition is not None:
            self.precondition = precondition


class SchemaError(SegreODEError):
    precondition = "schema"


class DivByZeroSeries(SegreODEError, ZeroDivisionError):
    precondition = "divisor-nonzero"


class EvalAtPole(SegreODEError):
    precondition = "eval-away-from-pole"


class InvalidHypersurface(SegreODEError):
    precondition = "valid-hypersurface"


class RelationsViolated(SegreODEError):
    precondition = "ode-relations"


class NotFuchsian(SegreODEError):
    precondition = "fuchsian"


class PoleAfterReduction(SegreODEError):
    precondition = "pole-free-reduction"


class InconsistentInputs(SegreODEError):
    precondition = "same-ode"


class DegenerateMap(SegreODEError):
    precondition = "nondegenerate-jacobian"


class NoRoot(SegreODEError):
    precondition = "Q(.,0)-has-root"


class BaseNotRoot(SegreODEError):
    precondition = "Q(z0,0)=0"


class StepUnderflow(SegreODEError):
    precondition = "integrable-path"


class PathTooClose(SegreODEError):
    precondition = "path-clearance"


class NotLinear(SegreODEError):
    precondition = "linear-ode"


class Psi1Vanishes(SegreODEError):
    precondition = "psi1-nonvanishing"


class Singular(SegreODEError):
    precondition = "nonsingular-matrix"


class RadiusWarning(UserWarning):
    """Evaluation point lies beyond the estimated radius of convergence."""
