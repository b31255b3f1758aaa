"""Centralizers of 3x3 monodromy operators and the automorphism bounds they give."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SchemaError, Singular

RANK_TOL = 1e-9
SCALAR_TOL = 1e-9
DET_TOL = 1e-10


def _as_matrix(sigma) -> np.ndarray:
    s = np.asarray(sigma, dtype=complex)
    if s.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {s.shape}")
    return s


def _check_nonsingular(s: np.ndarray):
    norm = np.linalg.norm(s, 2)
    if norm == 0 or abs(np.linalg.det(s)) < DET_TOL * norm ** 3:
        raise Singular("monodromy operator is numerically singular")


@dataclass
class CentralizerReport:
    dim_gl: int
    bound: int
    is_identity: bool
    singular_values: list
    near_boundary: bool

    def to_json(self):
        return {"dim_gl": self.dim_gl, "bound": self.bound, "is_identity": self.is_identity,
                "near_rank_boundary": self.near_boundary}


def commutator_operator(sigma) -> np.ndarray:
    """Matrix of ``X -> X sigma - sigma X`` on row-major vectorized ``X``."""
    s = _as_matrix(sigma)
    eye = np.eye(3)
    return np.kron(eye, s.T) - np.kron(s, eye)


def centralizer_report(sigma) -> CentralizerReport:
    s = _as_matrix(sigma)
    _check_nonsingular(s)
    sv = np.linalg.svd(commutator_operator(s), compute_uv=False)
    # anchor the threshold to |sigma| as well: for a (conjugated) scalar matrix
    # the commutator is pure round-off and its own top singular value is noise
    top = max(float(sv[0]), float(np.linalg.norm(s, 2)))
    thresh = RANK_TOL * top
    rank = int(np.sum(sv > thresh))
    dim = 9 - rank
    # flag a spectral gap narrower than 10x on either side of the threshold
    near = bool(np.any((sv > thresh / 10) & (sv < 10 * thresh)))
    scalar = is_scalar(s)
    bound = 8 if scalar else dim - 1
    return CentralizerReport(dim, bound, scalar, [float(x) for x in sv], near)


def is_scalar(sigma) -> bool:
    s = _as_matrix(sigma)
    return bool(np.linalg.norm(s - np.trace(s) / 3 * np.eye(3)) < SCALAR_TOL * np.linalg.norm(s))


def centralizer_dim(sigma) -> int:
    """Dimension of ``{X : X sigma = sigma X}`` inside gl(3, C)."""
    return centralizer_report(sigma).dim_gl


def hol_dim_bound(sigma) -> int:
    """``centralizer_dim - 1``; a scalar operator acts like the identity and gives 8."""
    return centralizer_report(sigma).bound


def matrix_from_json(obj) -> np.ndarray:
    """Parse a 3x3 matrix whose entries are numbers or ``[re, im]`` pairs."""
    from .series import parse_complex

    if isinstance(obj, dict):
        obj = obj.get("matrix")
    if not (isinstance(obj, list) and len(obj) == 3
            and all(isinstance(r, list) and len(r) == 3 for r in obj)):
        raise SchemaError("matrix must be a 3x3 list of [re, im] pairs")
    return np.array([[parse_complex(c) for c in row] for row in obj], dtype=complex)


__all__ = ["centralizer_dim", "hol_dim_bound", "centralizer_report", "is_scalar",
           "commutator_operator", "matrix_from_json", "CentralizerReport"]
