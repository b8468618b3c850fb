"""Exact scattering state of a free particle crossing N parallel line defects.

The unperturbed problem is a particle in the plane hitting N delta-line
defects, all parallel to the y axis, located at x = alpha_n with coupling
strengths z_n (sigma-scaled units: positions in units of sigma, couplings
absorb one factor of sigma, energies in units of hbar^2 / (2 m sigma^2)).
Because the lines are parallel, the y momentum is conserved and the problem
separates: psi0(x, y) = chi(x) e^{i k_y y} / (2 pi) with a 1D multi-delta
profile chi.

Writing the outgoing solution as

    chi(x) = e^{i k_x x} - i * sum_{m,n} e^{i k_x alpha_m} Ainv[m, n]
                                         e^{i k_x |x - alpha_n|},

the N x N linear system that fixes the scattered amplitudes has the
symmetric matrix

    A[m, n] = 2 k_x delta_{mn} / z_m + i e^{i k_x |alpha_m - alpha_n|}.

The same matrix evaluated at the outgoing momentum also drives the dual
(reciprocal) state psi0_dual whose conjugate serves as the bra in
first-order perturbation theory:

    chi_dual(x) = e^{i k_x x} + i * sum_{m,n} e^{i k_x alpha_m}
                  conj(Ainv)[m, n] e^{-i k_x |x - alpha_n|}.

Far-field transmission and mirror-reflection coefficients follow from the
|x| -> inf limits:

    t_plus  = -i * sum_{m,n} Ainv[m, n] cos(k_x (alpha_m - alpha_n))
    t_minus = -i * sum_{m,n} Ainv[m, n] e^{i k_x (alpha_m + alpha_n)}

and for purely real couplings flux conservation pins
|1 + t_plus|^2 + |t_minus|^2 = 1.

The zeroth-order scattering amplitude is distributional: a free flat plane
plus line defects scatters an incident plane wave into exactly two
directions (forward theta0 and mirror pi - theta0), so f0 is reported as
delta-function weights, never as a pointwise function of angle.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DefectSet",
    "Kinematics",
    "DefectMatrix",
    "SingularMatrixError",
    "TCoefficients",
    "F0Distribution",
    "build_defect_matrix",
    "t_coefficients",
    "f0_distributional",
    "chi_profile",
    "chi_dual_profile",
    "psi0",
    "psi0_dual",
]

# Defect positions closer than this (units of sigma) are rejected: the
# closed forms and the linear system both assume distinct lines.
MIN_SEPARATION = 1e-9

# theta0 must keep k_x = K cos(theta0) bounded away from zero.
THETA0_MARGIN = 1e-6

# Condition number beyond which the defect matrix is treated as singular.
COND_LIMIT = 1e15


class SingularMatrixError(np.linalg.LinAlgError):
    """Defect matrix is numerically singular; carries the condition estimate."""

    def __init__(self, message: str, cond: float):
        super().__init__(message)
        self.cond = cond


@dataclass(frozen=True)
class DefectSet:
    """Positions alpha_n (units of sigma) and couplings z_n of the N lines.

    Positions are stored sorted ascending, couplings permuted alongside;
    the piecewise closed forms of the geometric coefficients assume
    position-ordered labels, and sorting makes index order and position
    order coincide.  Couplings equal to exactly zero describe absent
    defects and are dropped with a warning.  N = 0 (free flat plane) is a
    valid configuration.
    """

    positions: tuple
    couplings: tuple

    def __init__(self, positions=(), couplings=()):
        positions = [float(p) for p in positions]
        couplings = [complex(z) for z in couplings]
        if len(positions) != len(couplings):
            raise ValueError(
                f"{len(positions)} positions but {len(couplings)} couplings"
            )
        if not all(math.isfinite(p) for p in positions):
            raise ValueError("defect positions must be finite")
        if not all(cmath.isfinite(z) for z in couplings):
            raise ValueError("defect couplings must be finite")
        keep = [i for i, z in enumerate(couplings) if z != 0.0]
        if len(keep) < len(positions):
            dropped = [positions[i] for i in range(len(positions)) if i not in keep]
            warnings.warn(
                f"dropping zero-coupling defects at {dropped}", stacklevel=2
            )
        order = sorted(keep, key=lambda i: positions[i])
        pos = tuple(positions[i] for i in order)
        for p, q in zip(pos, pos[1:]):
            if q - p <= MIN_SEPARATION:
                raise ValueError(
                    f"defect positions {p} and {q} are not distinct "
                    f"(separation <= {MIN_SEPARATION})"
                )
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "couplings", tuple(couplings[i] for i in order))

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def alphas(self) -> np.ndarray:
        return np.array(self.positions, dtype=float)

    @property
    def z(self) -> np.ndarray:
        return np.array(self.couplings, dtype=complex)

    def all_real_couplings(self) -> bool:
        return all(z.imag == 0.0 for z in self.couplings)


@dataclass(frozen=True)
class Kinematics:
    """Incident and outgoing directions at fixed wavenumber K (units 1/sigma).

    theta0 is the incidence angle measured from the x axis (normal to the
    defect lines); it must satisfy |theta0| < pi/2 - 1e-6 so the incident
    k_x stays positive.  theta is the observation angle, normalized into
    [-pi/2, 3*pi/2).  Derived quantities: Theta = theta - theta0,
    s = sin(Theta/2), and the rotated-frame momentum components used by the
    geometric coefficients (k and -k for the incoming/outgoing x components,
    K cos(Theta/2) shared along y).
    """

    bigK: float
    theta0: float
    theta: float

    def __post_init__(self):
        if not (np.isfinite(self.bigK) and self.bigK > 0.0):
            raise ValueError(f"K must be positive, got {self.bigK!r}")
        if not np.isfinite(self.theta0) or abs(self.theta0) >= math.pi / 2 - THETA0_MARGIN:
            raise ValueError(
                f"theta0 must satisfy |theta0| < pi/2 - {THETA0_MARGIN}, "
                f"got {self.theta0!r}"
            )
        if not np.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta!r}")
        # normalize theta into [-pi/2, 3*pi/2)
        th = math.remainder(self.theta - math.pi / 2, 2.0 * math.pi) + math.pi / 2
        if th >= 1.5 * math.pi:
            th -= 2.0 * math.pi
        object.__setattr__(self, "theta", th)

    @property
    def Theta(self) -> float:
        return self.theta - self.theta0

    @property
    def s(self) -> float:
        return math.sin(0.5 * self.Theta)

    @property
    def beta(self) -> float:
        """Rotated-frame incident x momentum, s * K."""
        return self.s * self.bigK

    @property
    def gamma(self) -> float:
        """Rotated-frame shared y momentum, K cos(Theta/2)."""
        return self.bigK * math.cos(0.5 * self.Theta)

    @property
    def kx(self) -> float:
        """Lab-frame incident x momentum K cos(theta0) (positive)."""
        return self.bigK * math.cos(self.theta0)

    @property
    def ky(self) -> float:
        return self.bigK * math.sin(self.theta0)

    @property
    def kx_out(self) -> float:
        """Lab-frame outgoing x momentum K cos(theta); any sign."""
        return self.bigK * math.cos(self.theta)

    @property
    def ky_out(self) -> float:
        return self.bigK * math.sin(self.theta)


@dataclass(frozen=True)
class DefectMatrix:
    """The symmetric defect matrix, its inverse, and a condition estimate."""

    matrix: np.ndarray
    inverse: np.ndarray
    cond: float


def build_defect_matrix(kx: float, defects: DefectSet) -> DefectMatrix:
    """Assemble and invert A[m,n] = 2 kx delta_mn / z_m + i e^{i kx |am - an|}.

    kx may have either sign (the outgoing-frame matrix uses K cos(theta));
    the inverse is computed by LU factorization with partial pivoting.
    Raises SingularMatrixError, carrying the condition-number estimate,
    when the matrix is numerically singular.
    """
    n = defects.n
    if n == 0:
        empty = np.zeros((0, 0), dtype=complex)
        return DefectMatrix(matrix=empty, inverse=empty, cond=1.0)
    alphas = defects.alphas
    z = defects.z
    sep = np.abs(alphas[:, None] - alphas[None, :])
    a = 1j * np.exp(1j * kx * sep)
    a[np.diag_indices(n)] += 2.0 * kx / z
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularMatrixError(
            f"defect matrix is singular to working precision (cond ~ {cond:.3g})",
            cond,
        )
    try:
        inv = np.linalg.solve(a, np.eye(n, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"defect matrix solve failed: {exc}", cond) from exc
    return DefectMatrix(matrix=a, inverse=inv, cond=cond)


@dataclass(frozen=True)
class TCoefficients:
    """Far-field transmission (t_plus) and mirror reflection (t_minus)."""

    t_plus: complex
    t_minus: complex

    @property
    def unitarity(self) -> float:
        """|1 + t_plus|^2 + |t_minus|^2; equals 1 for all-real couplings."""
        return abs(1.0 + self.t_plus) ** 2 + abs(self.t_minus) ** 2


def t_coefficients(kx: float, defects: DefectSet) -> TCoefficients:
    """Transmission and reflection coefficients of the defect array.

    t_plus uses the manifestly symmetric cosine form (the odd sine parts
    cancel pairwise because Ainv is symmetric).
    """
    if defects.n == 0:
        return TCoefficients(t_plus=0.0 + 0.0j, t_minus=0.0 + 0.0j)
    ainv = build_defect_matrix(kx, defects).inverse
    alphas = defects.alphas
    diff = alphas[:, None] - alphas[None, :]
    tot = alphas[:, None] + alphas[None, :]
    t_plus = complex(-1j * np.sum(ainv * np.cos(kx * diff)))
    t_minus = complex(-1j * np.sum(ainv * np.exp(1j * kx * tot)))
    return TCoefficients(t_plus=t_plus, t_minus=t_minus)


@dataclass(frozen=True)
class F0Distribution:
    """Zeroth-order amplitude: two delta-supported spikes, never pointwise.

    The flat-plane defect array scatters the incident wave into exactly the
    forward direction theta0 (weight t_plus) and the mirror direction
    pi - theta0 (weight t_minus), each multiplied by the common prefactor
    sqrt(2 pi / k) e^{-i pi/4}.  Evaluating f0 at a generic angle is
    meaningless; this object only reports the weights and their supports.
    """

    prefactor: complex
    t_plus: complex
    t_minus: complex
    theta_forward: float
    theta_mirror: float

    @property
    def forward_weight(self) -> complex:
        return self.prefactor * self.t_plus

    @property
    def mirror_weight(self) -> complex:
        return self.prefactor * self.t_minus

    @property
    def unitarity(self) -> float:
        return abs(1.0 + self.t_plus) ** 2 + abs(self.t_minus) ** 2


def f0_distributional(kin: Kinematics, defects: DefectSet) -> F0Distribution:
    """Delta-supported zeroth-order amplitude for the flat defect array."""
    tc = t_coefficients(kin.kx, defects)
    pref = math.sqrt(2.0 * math.pi / kin.bigK) * cmath.exp(-1j * math.pi / 4.0)
    return F0Distribution(
        prefactor=pref,
        t_plus=tc.t_plus,
        t_minus=tc.t_minus,
        theta_forward=kin.theta0,
        theta_mirror=math.pi - kin.theta0,
    )


def _scatter_weights(kx: float, defects: DefectSet) -> np.ndarray:
    """u[n] = sum_m e^{i kx alpha_m} Ainv[m, n]; chi = e^{ikx x} - i sum u_n e^{ikx|x-an|}."""
    if defects.n == 0:
        return np.zeros(0, dtype=complex)
    ainv = build_defect_matrix(kx, defects).inverse
    phases = np.exp(1j * kx * defects.alphas)
    return phases @ ainv


def chi_profile(x, kx: float, defects: DefectSet):
    """1D transverse profile chi(x) of psi0 (psi0 = chi(x) e^{i ky y} / 2 pi)."""
    x = np.asarray(x, dtype=float)
    u = _scatter_weights(kx, defects)
    out = np.exp(1j * kx * x).astype(complex)
    for un, an in zip(u, defects.alphas):
        out = out - 1j * un * np.exp(1j * kx * np.abs(x - an))
    return out


def chi_dual_profile(x, kx: float, defects: DefectSet):
    """Transverse profile of the dual state psi0_dual.

    chi_dual(x) = e^{i kx x} + i sum_{m,n} e^{i kx am} conj(Ainv)[m,n]
    e^{-i kx |x - an|}.  Its complex conjugate is the bra of first-order
    perturbation theory.
    """
    x = np.asarray(x, dtype=float)
    if defects.n == 0:
        return np.exp(1j * kx * x).astype(complex)
    ainv = build_defect_matrix(kx, defects).inverse
    phases = np.exp(1j * kx * defects.alphas)
    u = phases @ np.conj(ainv)
    out = np.exp(1j * kx * x).astype(complex)
    for un, an in zip(u, defects.alphas):
        out = out + 1j * un * np.exp(-1j * kx * np.abs(x - an))
    return out


def psi0(x, y, kin: Kinematics, defects: DefectSet):
    """Exact unperturbed scattering state (2 pi momentum normalization)."""
    y = np.asarray(y, dtype=float)
    return chi_profile(x, kin.kx, defects) * np.exp(1j * kin.ky * y) / (2.0 * math.pi)


def psi0_dual(x, y, kin: Kinematics, defects: DefectSet):
    """Dual unperturbed state; conj(psi0_dual) is the perturbative bra."""
    y = np.asarray(y, dtype=float)
    return (
        chi_dual_profile(x, kin.kx, defects)
        * np.exp(1j * kin.ky * y)
        / (2.0 * math.pi)
    )
