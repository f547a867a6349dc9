"""Plane-wave reflection and transmission through one or two detuned cavities."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lattice import AmplitudeVector, ModelError, dispersion

# |sin k| below this counts as a band edge (zero group velocity)
_EDGE = 1e-12


class DegenerateModelError(ModelError):
    """No propagation is possible (zero hopping with a detuned cavity)."""


@dataclass(frozen=True)
class ScatteringSolution:
    """Stationary scattering state for a photon incident from the left.

    ``interior`` holds ``(A, B)`` of ``A e^{ikj} + B e^{-ikj}`` between two
    impurities and is ``None`` for a single impurity or at a band edge.
    """

    k: float
    r: complex
    s: complex
    R: float
    T: float
    impurity_sites: tuple[int, ...]
    interior: Optional[tuple[complex, complex]] = None

    def amplitudes(self, sites) -> AmplitudeVector:
        """Scattering-normalized ``c_j`` (incident amplitude 1) on ``sites``."""
        j = np.asarray(sites, dtype=int)
        k = self.k
        left, right = min(self.impurity_sites), max(self.impurity_sites)
        fwd, back = np.exp(1j * k * j), np.exp(-1j * k * j)
        c = np.where(j <= left, fwd + self.r * back, self.s * fwd)
        if self.interior is not None:
            a, b = self.interior
            inside = (j > left) & (j < right)
            c = np.where(inside, a * fwd + b * back, c)
        return AmplitudeVector(j, c)


def reflection_coefficient(k, lam, omega_c: float = 1.0, hopping: float = 0.01):
    """Vectorized single-impurity ``R(k, lam)``."""
    v = np.asarray(lam) * omega_c
    g = 2.0 * hopping * np.sin(k)
    return v**2 / (g**2 + v**2)


def reflect_single(k: float, lam: float, omega_c: float = 1.0, hopping: float = 0.01) -> ScatteringSolution:
    """Scattering off one cavity detuned by ``lam`` at site 0.

    At a band edge (``sin k = 0``) with ``lam != 0`` the result is the
    total-reflection limit ``r = -1``.
    """
    v = lam * omega_c
    if v == 0:
        return ScatteringSolution(k, 0j, 1 + 0j, 0.0, 1.0, (0,))
    if hopping == 0:
        raise DegenerateModelError("zero hopping with a detuned cavity: nothing propagates")
    g = 2.0 * hopping * np.sin(k)
    if abs(np.sin(k)) < _EDGE:
        return ScatteringSolution(k, -1 + 0j, 0j, 1.0, 0.0, (0,))
    r = v / (1j * g - v)
    den = g * g + v * v
    return ScatteringSolution(k, complex(r), complex(1 + r), v * v / den, g * g / den, (0,))


def reflection_double_closed_form(k: float, lam0: float, d: int, omega_c: float = 1.0, hopping: float = 0.01) -> complex:
    """Closed-form reflection amplitude for two equal cavities at ``+-d``."""
    e = np.exp
    v, J = lam0 * omega_c, hopping
    q4 = e(4j * k * d)
    num = v * e(-1j * (2 * d - 1) * k) * (J * (1 + q4) * (e(2j * k) - 1) + v * (q4 - 1) * e(1j * k))
    den = J * (e(2j * k) - 1) * (J * (e(2j * k) - 1) - 2 * v * e(1j * k)) - v * v * (q4 - 1) * e(2j * k)
    return complex(num / den)


def _fold(k: float) -> float:
    k = float(np.mod(k, 2 * np.pi))
    return 2 * np.pi - k if k > np.pi else k


def reflect_double(
    k: float,
    lam0: float,
    d: int,
    omega_c: float = 1.0,
    hopping: float = 0.01,
    lam2: float | None = None,
) -> ScatteringSolution:
    """Scattering off cavities detuned by ``lam0`` at ``-d`` and ``lam2`` (default ``lam0``) at ``+d``.

    Solves the continuity and recurrence conditions at ``j = +-d`` as a
    4x4 linear system for ``(r, A, B, s)``.  ``k`` is folded into
    ``[0, pi]`` since only the incident energy matters.
    """
    if int(d) != d or d < 1:
        raise ModelError(f"half-separation d must be a positive integer, got {d}")
    lam1 = lam0
    lam2 = lam0 if lam2 is None else lam2
    sites = (-int(d), int(d))
    if lam1 == 0 and lam2 == 0:
        return ScatteringSolution(k, 0j, 1 + 0j, 0.0, 1.0, sites, (1 + 0j, 0j))
    if hopping == 0:
        raise DegenerateModelError("zero hopping: nothing propagates")
    kk = _fold(k)
    if abs(np.sin(kk)) < _EDGE:
        return ScatteringSolution(kk, -1 + 0j, 0j, 1.0, 0.0, sites)

    J = hopping
    w = dispersion(kk, omega_c, J)
    e = lambda j: np.exp(1j * kk * j)
    a1 = w - (1 + lam1) * omega_c
    a2 = w - (1 + lam2) * omega_c
    m = np.array(
        [
            [e(d), -e(-d), -e(d), 0],
            [0, e(d), e(-d), -e(d)],
            [-J * e(d + 1) - a1 * e(d), -J * e(1 - d), -J * e(d - 1), 0],
            [0, -J * e(d - 1), -J * e(1 - d), -J * e(d + 1) - a2 * e(d)],
        ],
        dtype=complex,
    )
    rhs = np.array([-e(-d), 0, J * e(-d - 1) + a1 * e(-d), 0], dtype=complex)
    r, a, b, s = np.linalg.solve(m, rhs)
    return ScatteringSolution(kk, complex(r), complex(s), float(abs(r) ** 2), float(abs(s) ** 2), sites, (complex(a), complex(b)))


SWEEP_COLUMNS = ("schema_version", "swept_variable", "swept_value", "k", "lambda", "R", "T", "re_r", "im_r", "re_s", "im_s")
SCHEMA_VERSION = 1


def sweep(op: str, variable: str, start: float, stop: float, count: int, **fixed) -> list[dict]:
    """Evaluate ``op`` ("single" or "double") on an even grid of ``variable``.

    ``variable`` is ``"k"`` or ``"lambda"``; the remaining parameters
    (``k``, ``lam``, ``d``, ``omega_c``, ``hopping``) come from ``fixed``.
    Rows follow :data:`SWEEP_COLUMNS` in grid order.
    """
    if count < 2 or not start < stop:
        raise ValueError(f"invalid sweep range {start}:{stop}:{count}")
    if op not in ("single", "double"):
        raise ValueError(f"unknown scattering op {op!r}")
    if variable not in ("k", "lambda"):
        raise ValueError(f"cannot sweep {variable!r}")
    omega_c = fixed.get("omega_c", 1.0)
    hopping = fixed.get("hopping", 0.01)
    rows = []
    for x in np.linspace(start, stop, count):
        k = x if variable == "k" else fixed["k"]
        lam = x if variable == "lambda" else fixed["lam"]
        if op == "single":
            sol = reflect_single(k, lam, omega_c, hopping)
        else:
            sol = reflect_double(k, lam, fixed["d"], omega_c, hopping)
        rows.append(
            dict(
                schema_version=SCHEMA_VERSION,
                swept_variable=variable,
                swept_value=float(x),
                k=float(k),
                **{"lambda": float(lam)},
                R=sol.R,
                T=sol.T,
                re_r=sol.r.real,
                im_r=sol.r.imag,
                re_s=sol.s.real,
                im_s=sol.s.imag,
            )
        )
    return rows
