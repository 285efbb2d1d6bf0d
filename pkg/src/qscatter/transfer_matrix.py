"""Classical 1D scattering oracle built on 2x2 transfer matrices.

Covers exact delta scatterers, rectangular barriers and wells (with
analytic continuation above the barrier), delta-pulse chains that
approximate arbitrary localized potentials, S-matrix construction,
even/odd phase shifts and an optical-theorem residual.

Wave convention: for a potential confined near the origin the scattering
solution is A e^{ikx} + B e^{-ikx} on the left and C e^{ikx} + D e^{-ikx}
on the right, and the transfer matrix maps right-side amplitudes to
left-side ones, (A, B) = M (C, D).  With that convention an incident
wave from the left gives T = 1/M11 and R = M21/M11.

Units: wavenumbers and energies are related through E = (hbar*k)^2/(2m).
The default scale has hbar = 2m = 1, so E = k^2 and the Schroedinger
prefactor 2m/hbar^2 is 1.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AsymmetryError, DomainError, PerfectReflectionError
from .tolerances import TOL


@dataclass(frozen=True)
class Units:
    """Mass and hbar fixing the wavenumber-energy relation."""

    m: float = 0.5
    hbar: float = 1.0

    @property
    def c2m(self):
        """2m/hbar^2, the prefactor turning potentials into curvatures."""
        return 2.0 * self.m / self.hbar**2

    def wavenumber(self, energy):
        if energy <= 0:
            raise DomainError(f"scattering energy must be positive, got {energy}")
        return math.sqrt(self.c2m * energy)


UNITS = Units()


# --------------------------------------------------------- transfer matrix


@dataclass(frozen=True)
class TransferMatrix:
    m11: complex
    m12: complex
    m21: complex
    m22: complex

    @property
    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m21

    def require_unimodular(self, tol=TOL.det_one):
        dev = abs(self.det - 1.0)
        if dev > tol:
            raise DomainError(f"transfer matrix determinant deviates from 1 by {dev:.3e}")

    def __matmul__(self, other):
        return TransferMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def as_array(self):
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)


IDENTITY_TRANSFER = TransferMatrix(1.0, 0.0, 0.0, 1.0)


def delta_transfer(eta, k, y=0.0):
    """Transfer matrix of one delta scatterer of dimensionless strength
    ``eta`` = m*g/(hbar^2 k) located at ``y``."""
    if k <= 0:
        raise DomainError(f"wavenumber must be positive, got {k}")
    shift = cmath.exp(2j * k * y)
    return TransferMatrix(
        1.0 + 1j * eta, 1j * eta / shift,
        -1j * eta * shift, 1.0 - 1j * eta,
    )


def translate_transfer(matrix, k, y):
    """Transfer matrix of the same scatterer displaced to ``y``.

    Conjugation by the free propagator: only the off-diagonal entries
    pick up e^{-+2iky}, so reflection phases move while transmission is
    untouched.
    """
    if k <= 0:
        raise DomainError(f"wavenumber must be positive, got {k}")
    shift = cmath.exp(2j * k * y)
    return TransferMatrix(
        matrix.m11, matrix.m12 / shift,
        matrix.m21 * shift, matrix.m22,
    )


def rt_from_transfer(matrix):
    """(R, T) for a wave incident from the left."""
    if matrix.m11 == 0:
        raise PerfectReflectionError(
            "transfer matrix has M11 = 0: transmission vanishes identically"
        )
    return matrix.m21 / matrix.m11, 1.0 / matrix.m11


def time_reversed_rt(r_amp, t_amp):
    """Amplitudes of the time-reversed (right-incident conjugate) process."""
    return r_amp.conjugate(), t_amp.conjugate()


# ------------------------------------------------------------ pulse chains


def sample_delta_pulses(potential, a, n_pulses, k, units=UNITS):
    """Strengths eta_j of the delta-pulse train approximating ``potential``
    over [-a/2, a/2): n_pulses samples at x_j = -a/2 + j*a/n_pulses.

    ``potential`` may be a callable V(x) or a constant.
    """
    if n_pulses < 1:
        raise DomainError(f"pulse count must be >= 1, got {n_pulses}")
    if a <= 0:
        raise DomainError(f"support width must be positive, got {a}")
    if k <= 0:
        raise DomainError(f"wavenumber must be positive, got {k}")
    xs = -a / 2.0 + (a / n_pulses) * np.arange(n_pulses)
    if callable(potential):
        values = np.array([float(potential(x)) for x in xs], dtype=np.float64)
    else:
        values = np.full(n_pulses, float(potential))
    return units.c2m * (a / n_pulses) * values / (2.0 * k)


def compose_transfer_chain(pulses, k, a):
    """Ordered product of delta-pulse transfers with free propagation
    a/N between pulses and half-width boundary factors.

    Algebraically identical to the product of single delta transfers
    located at x_j = -a/2 + j*a/N, so the N=1 chain is a delta sitting at
    the left edge -a/2, not at the center.
    """
    if k <= 0:
        raise DomainError(f"wavenumber must be positive, got {k}")
    n_pulses = len(pulses)
    if n_pulses == 0:
        edge = cmath.exp(1j * k * a / 2.0)
        return TransferMatrix(edge * edge, 0.0, 0.0, 1.0 / (edge * edge))
    step = cmath.exp(-1j * k * a / n_pulses)   # upper entry of the spacer
    edge = cmath.exp(1j * k * a / 2.0)         # upper entry of the boundary
    m11, m12, m21, m22 = edge, 0.0, 0.0, 1.0 / edge
    for eta in pulses:
        p11 = 1.0 + 1j * eta
        p21 = -1j * eta
        p12 = 1j * eta
        p22 = 1.0 - 1j * eta
        # multiply by the pulse, then by the spacer diag(step, 1/step)
        m11, m12 = (m11 * p11 + m12 * p21) * step, (m11 * p12 + m12 * p22) / step
        m21, m22 = (m21 * p11 + m22 * p21) * step, (m21 * p12 + m22 * p22) / step
    return TransferMatrix(m11 * edge, m12 / edge, m21 * edge, m22 / edge)


def chain_from_samples(u_samples, dx, x_first, k, units=UNITS):
    """Transfer matrix of a train of deltas sitting on an explicit sample
    grid: cell j carries weight u_samples[j]*dx at x_first + j*dx.

    This is the oracle matched to a potential already discretized on a
    register grid; zero-weight cells are skipped.
    """
    if k <= 0:
        raise DomainError(f"wavenumber must be positive, got {k}")
    matrix = IDENTITY_TRANSFER
    prefactor = units.c2m * dx / (2.0 * k)
    for j, u in enumerate(u_samples):
        if u == 0.0:
            continue
        matrix = matrix @ delta_transfer(prefactor * u, k, x_first + j * dx)
    return matrix


# --------------------------------------------------------- analytic barrier


def analytic_barrier_transfer(v0, energy, a, units=UNITS):
    """Exact transfer matrix of a rectangular region of height ``v0``
    (depth, when negative) and width ``a`` centered at the origin.

    Uses kappa = sqrt(2m(v0 - E))/hbar, which continues analytically to
    imaginary values above the barrier and for wells; the kappa -> 0
    degeneracy at E = v0 is replaced by its finite limit.
    """
    if energy <= 0:
        raise DomainError(f"scattering energy must be positive, got {energy}")
    if a <= 0:
        raise DomainError(f"barrier width must be positive, got {a}")
    k = units.wavenumber(energy)
    kappa = cmath.sqrt(units.c2m * (v0 - energy))
    edge = cmath.exp(1j * k * a)
    if abs(kappa * a) < 1e-12:
        # limit kappa -> 0: sinh(kappa a)/kappa -> a
        return TransferMatrix(
            (1.0 - 0.5j * k * a) * edge, 0.5j * k * a,
            -0.5j * k * a, (1.0 + 0.5j * k * a) / edge,
        )
    ch = cmath.cosh(kappa * a)
    sh = cmath.sinh(kappa * a)
    eps_minus = kappa / k - k / kappa
    eps_plus = kappa / k + k / kappa
    return TransferMatrix(
        (ch + 0.5j * eps_minus * sh) * edge, 0.5j * eps_plus * sh,
        -0.5j * eps_plus * sh, (ch - 0.5j * eps_minus * sh) / edge,
    )


# ------------------------------------------------- S-matrix and phase shifts


@dataclass(frozen=True)
class SMatrix:
    """2x2 map from incoming to outgoing plane-wave amplitudes."""

    s11: complex
    s12: complex
    s21: complex
    s22: complex

    @classmethod
    def from_rt(cls, r_amp, t_amp, k=None, y=0.0):
        """Build the S-matrix from left-incidence amplitudes.

        For a scatterer centered at ``y`` the right-incidence reflection
        acquires the translation phase e^{-4iky}; the default y=0 gives
        the familiar symmetric form [[R, T], [T, R]].
        """
        if y != 0.0:
            if k is None:
                raise DomainError("k is required when the center y is nonzero")
            r_right = r_amp * cmath.exp(-4j * k * y)
        else:
            r_right = r_amp
        return cls(r_amp, t_amp, t_amp, r_right)

    def as_array(self):
        return np.array([[self.s11, self.s12], [self.s21, self.s22]], dtype=complex)

    def unitarity_defect(self):
        s = self.as_array()
        return float(np.max(np.abs(s.conj().T @ s - np.eye(2))))

    def symmetry_defect(self):
        return abs(self.s12 - self.s21)

    def require_physical(self, tol=TOL.smatrix):
        dev = max(self.unitarity_defect(), self.symmetry_defect())
        if dev > tol:
            raise DomainError(f"S-matrix fails unitarity/symmetry by {dev:.3e}")

    def eigenvalues(self):
        return np.linalg.eigvals(self.as_array())


@dataclass(frozen=True)
class PhaseShifts:
    """Even- and odd-channel scattering phase shifts, radians."""

    even: float
    odd: float


def phase_shifts_from_rt(r_amp, t_amp, tol=TOL.phase_shift_closure):
    """Phase shifts of a parity-symmetric scatterer from (R, T).

    The even/odd combinations T + R and T - R must be unimodular for a
    symmetric real potential; deviations beyond ``tol`` raise
    AsymmetryError.  Each shift is half the argument, landing in
    (-pi/2, pi/2].
    """
    s_even = t_amp + r_amp
    s_odd = t_amp - r_amp
    for label, value in (("even", s_even), ("odd", s_odd)):
        dev = abs(abs(value) - 1.0)
        if dev > tol:
            raise AsymmetryError(
                f"|T {'+' if label == 'even' else '-'} R| deviates from 1 by {dev:.3e}; "
                "amplitudes are not from a symmetric potential"
            )
    half = 0.5 * cmath.phase(s_even)
    if half <= -math.pi / 2:
        half += math.pi
    odd_half = 0.5 * cmath.phase(s_odd)
    if odd_half <= -math.pi / 2:
        odd_half += math.pi
    return PhaseShifts(even=half, odd=odd_half)


def optical_theorem_residual(r_amp, t_amp, k):
    """|f(0)|^2 + |f(pi)|^2 - (2/k) Im f(0) with f built from (R, T);
    vanishes exactly for a unitary amplitude pair."""
    if k <= 0:
        raise DomainError(f"wavenumber must be positive, got {k}")
    f_forward = (t_amp - 1.0) / (1j * k)
    f_backward = r_amp / (1j * k)
    return (
        abs(f_forward) ** 2 + abs(f_backward) ** 2
        - (2.0 / k) * f_forward.imag
    )


# ------------------------------------------------------------------ scans


def potential_from_table(x_values, v_values):
    """Callable potential from a two-column table, linearly interpolated
    and zero outside the tabulated range."""
    x_values = np.asarray(x_values, dtype=np.float64)
    v_values = np.asarray(v_values, dtype=np.float64)
    if x_values.ndim != 1 or x_values.shape != v_values.shape or x_values.size < 2:
        raise DomainError("potential table needs two equal-length columns, >= 2 rows")
    if np.any(np.diff(x_values) <= 0):
        raise DomainError("potential table x column must be strictly increasing")

    def interpolated(x):
        return float(np.interp(x, x_values, v_values, left=0.0, right=0.0))

    return interpolated


def transmission_scan(potential, a, grid, *, vary="energy", energy=None,
                      n_pulses=1000, units=UNITS):
    """|T|^2 across an energy grid (vary="energy") or an overall strength
    grid at fixed energy (vary="strength"), each point via an
    ``n_pulses`` delta-pulse chain.

    Returns a list of row dicts with keys: parameter, T2, R2, arg_T,
    arg_R, flag; the flag marks strict local maxima/minima of |T|^2.
    """
    grid = list(grid)
    if not grid:
        raise DomainError("scan grid must be non-empty")
    if vary not in ("energy", "strength"):
        raise DomainError(f"vary must be 'energy' or 'strength', got {vary!r}")
    if vary == "strength" and energy is None:
        raise DomainError("strength scans need a fixed energy")

    rows = []
    for value in grid:
        if vary == "energy":
            e_here, v_here = float(value), potential
        else:
            e_here = float(energy)
            if callable(potential):
                v_here = (lambda s: (lambda x: s * potential(x)))(float(value))
            else:
                v_here = float(value) * float(potential)
        k = units.wavenumber(e_here)
        pulses = sample_delta_pulses(v_here, a, n_pulses, k, units=units)
        r_amp, t_amp = rt_from_transfer(compose_transfer_chain(pulses, k, a))
        rows.append({
            "parameter": float(value),
            "T2": abs(t_amp) ** 2,
            "R2": abs(r_amp) ** 2,
            "arg_T": cmath.phase(t_amp),
            "arg_R": cmath.phase(r_amp),
            "flag": "",
        })
    t2 = [row["T2"] for row in rows]
    for i in range(1, len(rows) - 1):
        if t2[i] > t2[i - 1] and t2[i] > t2[i + 1]:
            rows[i]["flag"] = "max"
        elif t2[i] < t2[i - 1] and t2[i] < t2[i + 1]:
            rows[i]["flag"] = "min"
    return rows
