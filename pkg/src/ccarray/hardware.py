"""Superconducting-circuit knobs that set the cavity detuning."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np
from scipy.constants import e as ELEMENTARY_CHARGE
from scipy.constants import h as PLANCK
from scipy.optimize import brentq

PHI0 = PLANCK / (2 * ELEMENTARY_CHARGE)

# |I| / I_c(phi_x) below which arcsin(x)/x is replaced by its series
_SERIES_SWITCH = 1e-6
REGIME_BAND = (0.005, 0.02)


class RegimeWarning(UserWarning):
    """Parameters fall outside the harmonic/weak-hopping approximations."""


@dataclass(frozen=True)
class HardwareParams:
    """Transmission-line resonator terminated by a symmetric SQUID (SI units)."""

    E_J: float
    f: float
    C_s: float
    l0: float
    C0: float
    L0: float

    def __post_init__(self):
        for name in ("E_J", "l0", "C0", "L0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.C_s < 0:
            raise ValueError("C_s must be nonnegative")

    @property
    def C_cav(self) -> float:
        return self.C0 * self.l0

    @property
    def L_cav(self) -> float:
        return self.L0 * self.l0

    @property
    def load(self) -> float:
        """Dimensionless ``(2 pi / Phi0)^2 E_J(f) L_cav``."""
        return (2 * math.pi / PHI0) ** 2 * effective_josephson_energy(self.E_J, self.f, warn=False) * self.L_cav

    @property
    def capacitance_ratio(self) -> float:
        return 2 * self.C_s / self.C_cav


def effective_josephson_energy(E_J: float, f: float, warn: bool = True) -> float:
    """``2 E_J cos(f/2)`` of a symmetric SQUID at reduced flux ``f``."""
    value = 2 * E_J * math.cos(f / 2)
    if warn and value < 0:
        warnings.warn(f"E_J(f) = {value:.3e} < 0 at f = {f}: outside the harmonic regime", RegimeWarning, stacklevel=2)
    return value


def solve_mode_equation(load: float, capacitance_ratio: float, n_modes: int) -> np.ndarray:
    """First ``n_modes`` positive roots of ``u tan u = load - capacitance_ratio u^2``.

    With ``load > 0`` the first root lies in ``(0, pi/2)``; after that one
    root per tangent branch ``((m - 1/2) pi, (m + 1/2) pi)``.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if load < 0:
        raise ValueError("negative load: harmonic approximation does not apply")
    g = lambda u: u * math.tan(u) - load + capacitance_ratio * u * u
    tiny = 1e-12
    branches = []
    if load > 0:
        branches.append((tiny, math.pi / 2 - tiny))
    m = 1
    while len(branches) < n_modes:
        branches.append(((m - 0.5) * math.pi + tiny, (m + 0.5) * math.pi - tiny))
        m += 1
    roots = []
    for a, b in branches[:n_modes]:
        if g(a) * g(b) > 0:
            # g is increasing on every branch, so this only happens when the
            # root sits within `tiny` of an edge
            roots.append(a if abs(g(a)) < abs(g(b)) else b)
            continue
        roots.append(brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    return np.array(roots)


@dataclass(frozen=True)
class ModeRoots:
    u: np.ndarray
    k: np.ndarray
    load: float
    regime_ok: bool


def dispersion_roots(params: HardwareParams, n_modes: int = 3) -> ModeRoots:
    """Mode wave vectors of the SQUID-terminated resonator.

    A negative effective Josephson energy is refused with a
    :class:`RegimeWarning` and an empty result.
    """
    ej = effective_josephson_energy(params.E_J, params.f, warn=False)
    if ej < 0:
        warnings.warn("E_J(f) < 0: no harmonic modes reported", RegimeWarning, stacklevel=2)
        return ModeRoots(np.array([]), np.array([]), params.load, False)
    u = solve_mode_equation(params.load, params.capacitance_ratio, n_modes)
    return ModeRoots(u, u / params.l0, params.load, True)


def squid_critical_current(I_c: float, phi_x: float) -> float:
    """``|2 I_c cos(phi_x / 2)|``."""
    return abs(2 * I_c * math.cos(phi_x / 2))


def effective_inductance(I: float, I_c: float, phi_x: float) -> float:
    """``(Phi0 / 2 pi I) arcsin(I / I_c(phi_x))`` with the ``I -> 0`` limit built in."""
    if not I_c > 0:
        raise ValueError("junction critical current must be positive")
    if abs(math.cos(phi_x / 2)) < 1e-12:
        raise ZeroDivisionError(f"SQUID critical current vanishes at phi_x = {phi_x}: inductance diverges")
    ic = squid_critical_current(I_c, phi_x)
    x = I / ic
    if abs(x) >= 1:
        raise ValueError(f"|I| = {abs(I):.3e} A >= I_c(phi_x) = {ic:.3e} A: junction switches")
    if abs(x) < _SERIES_SWITCH:
        ratio = 1 + x * x / 6 + 3 * x**4 / 40
    else:
        ratio = math.asin(x) / x
    return PHI0 / (2 * math.pi * ic) * ratio


def _exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Real):
        return Fraction(x)
    raise TypeError(f"expected a real number, got {type(x).__name__}")


@dataclass(frozen=True)
class DetuningRange:
    lam_min: float
    lam_max: float
    exact: tuple[Fraction, Fraction]


def detuning_range(omega_min, omega_max, omega_ref) -> DetuningRange:
    """``lambda = omega / omega_ref - 1`` at both ends of a tuning window.

    Evaluated in exact rational arithmetic on the binary values of the
    inputs, then rounded once.
    """
    lo, hi, ref = (_exact(v) for v in (omega_min, omega_max, omega_ref))
    if lo <= 0 or hi <= 0 or ref <= 0:
        raise ValueError("frequencies must be positive")
    if lo > hi:
        raise ValueError("omega_min must not exceed omega_max")
    a, b = lo / ref - 1, hi / ref - 1
    return DetuningRange(float(a), float(b), (a, b))


@dataclass(frozen=True)
class HoppingCheck:
    ratio: float
    in_regime: bool


def hopping_scale_check(J: float, omega_c: float, band: tuple[float, float] = REGIME_BAND) -> HoppingCheck:
    """``J / omega_c`` and whether it sits in the weak-hopping band."""
    if J < 0 or omega_c <= 0:
        raise ValueError("need J >= 0 and omega_c > 0")
    ratio = J / omega_c
    return HoppingCheck(ratio, band[0] <= ratio <= band[1])
