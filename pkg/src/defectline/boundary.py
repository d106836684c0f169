"""Connection condition at the defect and explicit eigenfunctions on the box.

The particle lives on [-l, l] with hard walls at both ends and a point defect
at x = 0.  One-sided boundary data at the defect is collected into two-vectors

    phi  = (phi(0+), phi(0-)),
    dphi = (-phi'(0+), phi'(0-)),

i.e. the derivatives are taken in the direction pointing *toward* the defect
from each side.  A defect matrix U in U(2) selects a self-adjoint Hamiltonian
through the connection condition

    (U - I) phi + i L0 (U + I) dphi = 0,

where L0 is a fixed unit of length.  Eigenfunctions are built from the
wall-anchored basis psi_-(x) = sin(k(x+l)) on the left and
psi_+(x) = sin(k(x-l)) on the right (sinh for bound states, linear for the
zero-energy level), so the Dirichlet walls hold exactly and the connection
condition becomes a 2x2 linear system M(k) a = 0 for the amplitude pair
a = (ampR, ampL).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import NotAnEigenvalue, NotUnitary, OutOfDomain
from .unitary import INPUT_TOL, frame_matrix, is_unitary, matrix_to_params

if TYPE_CHECKING:
    from .spectrum import EigenLevel

__all__ = [
    "BoundaryCondition",
    "BoundaryVectors",
    "Eigenfunction",
    "boundary_residual",
    "current_mismatch",
    "connection_matrix",
    "build_eigenfunction",
    "level_eigenbasis",
    "reflect",
    "sample_eigenfunction",
]

_I2 = np.eye(2, dtype=complex)

# Relative tolerance on the smallest singular value of M(k) below which k is
# accepted as an eigenvalue (and, one tier further down, as degenerate).
EIGEN_SV_TOL = 1e-6

KIND_POSITIVE = "positive"
KIND_ZERO = "zero"
KIND_BOUND = "bound"


@dataclass(frozen=True)
class BoundaryCondition:
    """A physical system: defect matrix ``u``, half-width ``l``, length unit ``L0``."""

    u: np.ndarray
    l: float = 1.0
    L0: float = 1.0

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=complex)
        if not is_unitary(u, INPUT_TOL):
            raise NotUnitary("defect matrix is not unitary within 1e-10")
        if not (math.isfinite(self.l) and self.l > 0):
            raise ValueError("l must be a positive length")
        if not (math.isfinite(self.L0) and self.L0 > 0):
            raise ValueError("L0 must be a positive length")
        u = u.copy()
        u.setflags(write=False)
        object.__setattr__(self, "u", u)


@dataclass(frozen=True)
class BoundaryVectors:
    """One-sided boundary data: values ``phi`` and toward-defect derivatives ``dphi``.

    Component order is (0+ side, 0- side) in both vectors; the sign adjustment
    on ``dphi`` is described in the module docstring.
    """

    phi: np.ndarray
    dphi: np.ndarray

    def __post_init__(self) -> None:
        for name in ("phi", "dphi"):
            v = np.asarray(getattr(self, name), dtype=complex)
            if v.shape != (2,):
                raise ValueError(f"{name} must be a complex 2-vector")
            if not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must have finite entries")
            v = v.copy()
            v.setflags(write=False)
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class Eigenfunction:
    """A normalized piecewise eigenfunction of the box with one defect.

    The function is ``ampL * b(k, x + l)`` on (-l, 0) and ``ampR * b(k, x - l)``
    on (0, l), where the basis profile b is sin(k*.) for kind "positive",
    sinh(k*.) for kind "bound" (k then stores kappa), and the identity (x -> x)
    for kind "zero".  Amplitudes are stored already normalized to unit L2 norm;
    ``norm`` records the L2 norm of the piecewise function built from the
    unit-norm amplitude pair, i.e. the constant divided out during
    normalization.  ``degenerate`` marks levels whose solution space is
    two-dimensional (both channels resonant).
    """

    kind: str
    k: float
    l: float
    ampL: complex
    ampR: complex
    norm: float
    degenerate: bool = False

    def boundary_vectors(self) -> BoundaryVectors:
        """Boundary data (phi, dphi) of this eigenfunction at the defect."""
        val, der = _basis_boundary_data(self.kind, self.k, self.l)
        phi = np.array([-self.ampR * val, self.ampL * val])
        dphi = np.array([-self.ampR * der, self.ampL * der])
        return BoundaryVectors(phi=phi, dphi=dphi)


def boundary_residual(bc: BoundaryCondition, v: BoundaryVectors) -> float:
    """2-norm of (U - I) phi + i L0 (U + I) dphi; zero iff v satisfies the condition."""
    r = (bc.u - _I2) @ v.phi + 1j * bc.L0 * (bc.u + _I2) @ v.dphi
    return float(np.linalg.norm(r))


def current_mismatch(v: BoundaryVectors) -> float:
    """Probability-current jump |dphi^dag phi - phi^dag dphi| across the defect.

    Vanishes for any v satisfying the connection condition with unitary U;
    the absolute value makes the result independent of the derivative sign
    convention.
    """
    return float(abs(np.vdot(v.dphi, v.phi) - np.vdot(v.phi, v.dphi)))


def connection_matrix(u: np.ndarray, L0: float, val: complex, der: complex) -> np.ndarray:
    """Assemble M = (U - I) Phi + i L0 (U + I) dPhi for the wall-anchored basis.

    ``val`` and ``der`` are the endpoint value magnitude and derivative of the
    basis profile at the defect (e.g. sin(kl) and k cos(kl)); columns of M
    correspond to the right/left basis functions, rows to the 0+/0- components.
    Complex ``val``/``der`` are allowed, which is how the determinant solver
    evaluates M at imaginary wavenumbers.
    """
    a = np.asarray(u, dtype=complex) - _I2
    b = 1j * L0 * (np.asarray(u, dtype=complex) + _I2)
    m = val * a + der * b
    m[:, 0] *= -1.0
    return m


def _basis_boundary_data(kind: str, k: float, l: float) -> tuple[float, float]:
    # (val, der) with psi_+(0) = -val, psi_+'(0) = der, psi_-(0) = val,
    # psi_-'(0) = der for the wall-anchored basis pair of the given kind.
    if kind == KIND_POSITIVE:
        return math.sin(k * l), k * math.cos(k * l)
    if kind == KIND_BOUND:
        return math.sinh(k * l), k * math.cosh(k * l)
    if kind == KIND_ZERO:
        return l, 1.0
    raise ValueError(f"unknown eigenfunction kind {kind!r}")


def _one_side_norm_sq(kind: str, k: float, l: float) -> float:
    # Integral of the squared basis profile over one half of the box.
    if kind == KIND_POSITIVE:
        return l / 2.0 - math.sin(2.0 * k * l) / (4.0 * k)
    if kind == KIND_BOUND:
        return math.sinh(2.0 * k * l) / (4.0 * k) - l / 2.0
    if kind == KIND_ZERO:
        return l ** 3 / 3.0
    raise ValueError(f"unknown eigenfunction kind {kind!r}")


def _canonical_phase(a: np.ndarray) -> np.ndarray:
    # Rotate a 2-vector so its largest-modulus component is real positive.
    j = int(np.argmax(np.abs(a)))
    mag = abs(a[j])
    if mag == 0.0:
        return a
    return a * (mag / a[j])


def _finish(kind: str, k: float, l: float, amp: np.ndarray, degenerate: bool) -> Eigenfunction:
    eta = _one_side_norm_sq(kind, k, l)
    amp = _canonical_phase(amp / np.linalg.norm(amp))
    norm = math.sqrt(eta)
    amp = amp / norm
    return Eigenfunction(
        kind=kind,
        k=k,
        l=l,
        ampL=complex(amp[1]),
        ampR=complex(amp[0]),
        norm=norm,
        degenerate=degenerate,
    )


def level_eigenbasis(bc: BoundaryCondition, level: "EigenLevel") -> tuple[Eigenfunction, ...]:
    """All eigenfunctions of a level: one for simple levels, a canonical pair
    for degenerate ones.

    Simple levels take the amplitude pair from the one-dimensional nullspace of
    M(k).  When the nullspace is two-dimensional the connection condition is
    void and the returned pair pulls the two channel directions back through
    the eigenframe of U, which makes the output deterministic and L2-orthogonal.
    Raises NotAnEigenvalue when M(k) has no (numerical) nullspace at all.
    """
    kind = level.kind
    k = level.k_or_kappa
    val, der = _basis_boundary_data(kind, k, bc.l)
    m = connection_matrix(bc.u, bc.L0, val, der)
    _, s, vh = np.linalg.svd(m)
    mscale = abs(val) + bc.L0 * abs(der)
    if s[0] <= EIGEN_SV_TOL * (1.0 + mscale):
        # Both channels resonant, M ~ 0: amplitude pairs from the frame of U.
        frame = frame_matrix(matrix_to_params(bc.u))
        flip = np.array([[-1.0, 0.0], [0.0, 1.0]])
        return tuple(
            _finish(kind, k, bc.l, flip @ frame.conj().T[:, j], True) for j in (0, 1)
        )
    if s[1] > EIGEN_SV_TOL * (1.0 + s[0]):
        raise NotAnEigenvalue(
            f"k={k!r} is not an eigenvalue of this system (kind {kind!r})"
        )
    return (_finish(kind, k, bc.l, vh[1].conj(), False),)


def build_eigenfunction(bc: BoundaryCondition, level: "EigenLevel") -> Eigenfunction:
    """The eigenfunction of a level (first of the canonical pair if degenerate)."""
    return level_eigenbasis(bc, level)[0]


def reflect(f: Eigenfunction) -> Eigenfunction:
    """The spatial reflection x -> -x of an eigenfunction.

    All basis profiles are odd around their wall anchor, so reflection swaps
    and negates the two amplitudes.  If f solves the system with matrix U, the
    result solves the system with sigma1 U sigma1 at the same energy.
    """
    return Eigenfunction(
        kind=f.kind,
        k=f.k,
        l=f.l,
        ampL=-f.ampR,
        ampR=-f.ampL,
        norm=f.norm,
        degenerate=f.degenerate,
    )


def _profile(kind: str, k: float, arg: np.ndarray) -> np.ndarray:
    if kind == KIND_POSITIVE:
        return np.sin(k * arg)
    if kind == KIND_BOUND:
        return np.sinh(k * arg)
    if kind == KIND_ZERO:
        return arg
    raise ValueError(f"unknown eigenfunction kind {kind!r}")


def sample_eigenfunction(f: Eigenfunction, grid) -> np.ndarray:
    """Pointwise values of f on positions in [-l, l] \\ {0}.

    Values at the walls are exactly zero.  Raises OutOfDomain for positions
    outside the box or at the excluded defect point x = 0.
    """
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1:
        x = np.atleast_1d(x)
    if np.any(np.abs(x) > f.l):
        raise OutOfDomain("sample positions must lie in [-l, l]")
    if np.any(x == 0.0):
        raise OutOfDomain("x = 0 is the excluded defect point")
    out = np.empty(x.shape, dtype=complex)
    left = x < 0.0
    out[left] = f.ampL * _profile(f.kind, f.k, x[left] + f.l)
    out[~left] = f.ampR * _profile(f.kind, f.k, x[~left] - f.l)
    return out
