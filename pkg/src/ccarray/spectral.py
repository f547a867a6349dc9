"""Bound and resonant photon states around one or two detuned cavities."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy.optimize import brentq

from .lattice import AmplitudeVector, ModelError, dispersion

TAIL_TOL = 1e-12
MAX_SITES = 100_000
RESONANCE_THRESHOLD = 50.0


class RootBracketError(RuntimeError):
    """A root could not be bracketed; ``brackets`` holds the offending intervals."""

    def __init__(self, message: str, brackets=()):
        dump = "; ".join(f"[{a!r}, {b!r}] -> ({fa!r}, {fb!r})" for a, b, fa, fb in brackets)
        super().__init__(f"{message}: {dump}" if dump else message)
        self.brackets = list(brackets)


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


class RootSign(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class XClass(str, Enum):
    """Real part of the complex wave vector ``k = x + iy``."""

    EVEN_PI = "x=2n*pi"
    ODD_PI = "x=(2n+1)*pi"
    REAL = "y=0"


@dataclass(frozen=True)
class BoundStateSolution:
    energy: float
    decay: float
    parity: Parity
    profile: AmplitudeVector
    location: str  # "above_band" | "below_band"
    branch: Optional["QuantizationBranch"] = None


@dataclass(frozen=True)
class ResonantStateSolution:
    x: float
    parity: Parity
    mode_index: int
    profile: AmplitudeVector
    energy: float
    valid: Optional[bool] = None


@dataclass(frozen=True)
class NoState:
    """A branch whose only solution is the vanishing wavefunction."""

    reason: str

    def __bool__(self):
        return False


@dataclass(frozen=True)
class QuantizationBranch:
    root_sign: RootSign
    x_class: XClass

    def __post_init__(self):
        object.__setattr__(self, "root_sign", RootSign(self.root_sign))
        object.__setattr__(self, "x_class", XClass(self.x_class))

    @property
    def parity(self) -> Parity:
        return Parity.ODD if self.root_sign is RootSign.POSITIVE else Parity.EVEN

    def classify(self, lam0: float) -> str:
        """State kind this branch supports for the sign of ``lam0``.

        One of ``"none"``, ``"odd_bound"``, ``"even_bound"``,
        ``"odd_resonant"``, ``"even_resonant"``.
        """
        if self.x_class is XClass.REAL:
            return f"{self.parity.value}_resonant"
        if lam0 == 0:
            return "none"
        # nontrivial decay only when sinh enters with a negative coefficient
        attractive = (lam0 < 0) == (self.x_class is XClass.EVEN_PI)
        return f"{self.parity.value}_bound" if attractive else "none"


StateResult = Union[BoundStateSolution, ResonantStateSolution, NoState]


def all_branches() -> list[QuantizationBranch]:
    return [QuantizationBranch(s, x) for s in RootSign for x in XClass]


# ---------------------------------------------------------------- one cavity


def band_pole_function(omega, lam: float, n_sites: int = 21, omega_c: float = 1.0, hopping: float = 0.01):
    """``(lam omega_c / N) sum_k 1/(omega - Omega_k)`` over the periodic k grid."""
    h = (n_sites - 1) // 2
    poles = dispersion(2 * np.pi * np.arange(-h, h + 1) / n_sites, omega_c, hopping)
    omega = np.asarray(omega, dtype=float)
    return lam * omega_c / n_sites * np.sum(1.0 / (omega[..., None] - poles), axis=-1)


def band_poles(n_sites: int, omega_c: float = 1.0, hopping: float = 0.01) -> np.ndarray:
    """Sorted distinct band frequencies of the periodic chain."""
    h = (n_sites - 1) // 2
    return dispersion(2 * np.pi * np.arange(0, h + 1) / n_sites, omega_c, hopping)


def band_pole_roots(lam: float, n_sites: int = 21, omega_c: float = 1.0, hopping: float = 0.01) -> np.ndarray:
    """All real roots of ``band_pole_function(omega) = 1``, ascending.

    One root lies between each pair of consecutive distinct poles, plus one
    outside the band on the side of ``sign(lam)``.
    """
    if lam == 0:
        raise ModelError("band-pole equation needs a nonzero detuning")
    if n_sites < 3 or n_sites % 2 == 0:
        raise ModelError(f"n_sites must be odd and >= 3, got {n_sites}")
    poles = band_poles(n_sites, omega_c, hopping)
    eps = 1e-12 * omega_c
    f = lambda w: float(band_pole_function(w, lam, n_sites, omega_c, hopping)) - 1.0
    brackets = [(a + eps, b - eps) for a, b in zip(poles[:-1], poles[1:])]
    reach = abs(lam) * omega_c + 2 * hopping
    if lam > 0:
        brackets.append((poles[-1] + eps, poles[-1] + reach))
    else:
        brackets.insert(0, (poles[0] - reach, poles[0] - eps))
    roots, bad = [], []
    for a, b in brackets:
        fa, fb = f(a), f(b)
        if fa * fb > 0:
            bad.append((a, b, fa, fb))
            continue
        roots.append(brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    if bad:
        raise RootBracketError("band-pole root not bracketed", bad)
    return np.sort(np.array(roots))


def _symmetric_window(weight, start: int, tail_tol: float, max_sites: int) -> int:
    """Smallest half-width ``W >= start`` whose outer tail weight is below ``tail_tol``."""
    cap = (max_sites - 1) // 2
    w = start
    while w < cap and weight(w) >= tail_tol:
        w += 1
    return w


def single_mu(lam: float, omega_c: float = 1.0, hopping: float = 0.01) -> float:
    """Signed ratio ``mu`` with ``|mu| < 1`` selected by the sign of ``lam``.

    ``mu = mu_+`` for ``lam > 0`` and ``mu_-`` for ``lam < 0``, written in the
    cancellation-free form ``-sign(lam) 2J / (|lam| omega_c + S)``.
    """
    v = abs(lam) * omega_c
    s = math.sqrt(4 * hopping**2 + v * v)
    return -math.copysign(2 * hopping / (v + s), lam)


def bound_state_single(
    lam: float,
    omega_c: float = 1.0,
    hopping: float = 0.01,
    tail_tol: float = TAIL_TOL,
    max_sites: int = MAX_SITES,
) -> BoundStateSolution:
    """Even bound state ``c_j = A mu^{|j|}`` of a single cavity detuned by ``lam``.

    Energy ``omega_c + sign(lam) sqrt(4J^2 + (lam omega_c)^2)``; ``mu``
    alternates in sign above the band.
    """
    if lam == 0:
        raise ModelError("no bound state for zero detuning")
    mu = single_mu(lam, omega_c, hopping)
    energy = omega_c + math.copysign(math.sqrt(4 * hopping**2 + (lam * omega_c) ** 2), lam)
    m2 = mu * mu
    total = (1 + m2) / (1 - m2)
    tail = lambda w: 2 * m2 ** (w + 1) / (1 - m2) / total
    w = _symmetric_window(tail, 0, tail_tol, max_sites)
    j = np.arange(-w, w + 1)
    c = np.power(mu, np.abs(j)) if mu != 0 else (j == 0).astype(float)
    profile = AmplitudeVector(j, c).normalized()
    return BoundStateSolution(energy, abs(mu), Parity.EVEN, profile, "above_band" if lam > 0 else "below_band")


# --------------------------------------------------------------- two cavities


def quantization_function(y, branch: QuantizationBranch, lam0: float, d: int, omega_c: float = 1.0, hopping: float = 0.01):
    """``+-exp(-2dy) - 1 - sigma (2J / lam0 omega_c) sinh y`` for the branch.

    ``+`` for the positive root, ``sigma = +1`` for ``x = 2n pi`` and ``-1``
    for ``x = (2n+1) pi``.
    """
    sign = 1.0 if branch.root_sign is RootSign.POSITIVE else -1.0
    sigma = 1.0 if branch.x_class is XClass.EVEN_PI else -1.0
    a = sigma * 2 * hopping / (lam0 * omega_c)
    return sign * np.exp(-2 * d * np.asarray(y)) - 1.0 - a * np.sinh(y)


def _solve_decay(branch: QuantizationBranch, lam0: float, d: int, omega_c: float, hopping: float) -> Optional[float]:
    if branch.classify(lam0) == "none":
        return None
    g = lambda y: float(quantization_function(y, branch, lam0, d, omega_c, hopping))
    slope = 2 * hopping / (abs(lam0) * omega_c)
    right = math.asinh(abs(lam0) * omega_c / hopping) + 1.0
    if branch.root_sign is RootSign.POSITIVE:
        # g(0) = 0 and g convex: a positive root needs g'(0) = slope - 2d < 0
        if slope >= 2 * d:
            return None
        dg = lambda y: -2 * d * math.exp(-2 * d * y) + slope * math.cosh(y)
        left = brentq(dg, 0.0, right, xtol=1e-15)
    else:
        left = 0.0
    gl, gr = g(left), g(right)
    if gl * gr > 0:
        raise RootBracketError("decay constant not bracketed", [(left, right, gl, gr)])
    y = brentq(g, left, right, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(g(y)) >= 1e-12:
        raise RootBracketError(f"decay constant did not converge (|f|={abs(g(y)):.3e})", [(left, right, gl, gr)])
    return y


def bound_profile_double(
    y: float,
    d: int,
    parity: Union[Parity, str],
    window: Optional[int] = None,
    alternating: bool = False,
    tail_tol: float = TAIL_TOL,
    max_sites: int = MAX_SITES,
) -> AmplitudeVector:
    """Unit-normalized two-cavity bound state on sites ``[-window, window]``.

    Odd: ``-2 sinh(yj)`` inside ``|j| < d`` with ``-(e^{2dy} - 1) e^{-yj}``
    wings; even: ``2 cosh(yj)`` with ``(e^{2dy} + 1) e^{-y|j|}`` wings.
    Everything is scaled by ``e^{-yd}`` to stay finite.  ``alternating``
    multiplies by ``(-1)^j`` (the ``x = (2n+1) pi`` class).
    """
    parity = Parity(parity)
    if y <= 0:
        raise ModelError(f"decay constant must be positive, got {y}")
    sgn = -1.0 if parity is Parity.ODD else 1.0
    if window is None:
        # wing weight beyond w relative to the O(1) peak at |j| = d
        tail = lambda w: math.exp(-2 * y * (w + 1 - d)) / (1 - math.exp(-2 * y))
        window = _symmetric_window(tail, d, tail_tol, max_sites)
    jp = np.arange(0, window + 1)
    inner = np.exp(y * (jp - d)) + sgn * np.exp(-y * (jp + d))
    outer = np.exp(y * (d - jp)) + sgn * np.exp(-y * (jp + d))
    half = np.where(jp < d, inner, outer)
    if parity is Parity.ODD:
        half = -half
    if alternating:
        half = half * np.where(jp % 2, -1.0, 1.0)
    values = np.concatenate([sgn * half[:0:-1], half])
    sites = np.arange(-window, window + 1)
    return AmplitudeVector(sites, values).normalized()


def resonant_state(
    m: int,
    d: int,
    parity: Union[Parity, str],
    lam0: Optional[float] = None,
    omega_c: float = 1.0,
    hopping: float = 0.01,
    threshold: float = RESONANCE_THRESHOLD,
    window: Optional[int] = None,
) -> ResonantStateSolution:
    """State confined strictly between two strongly detuned cavities.

    Odd: ``sin(m pi j / d)`` with ``x = m pi / d``; even:
    ``cos((2m+1) pi j / 2d)`` with ``x = (2m+1) pi / 2d``.  ``valid`` reports
    whether ``|lam0| omega_c / 2J >= threshold`` when ``lam0`` is given.
    """
    parity = Parity(parity)
    if int(m) != m or m < 1 or int(d) != d or d < 1:
        raise ModelError(f"need integers m >= 1 and d >= 1, got m={m}, d={d}")
    if parity is Parity.ODD:
        if m % d == 0:
            raise ModelError(f"odd profile with m={m}, d={d} vanishes identically")
        x = m * math.pi / d
    else:
        x = (2 * m + 1) * math.pi / (2 * d)
    window = d if window is None else max(window, d)
    j = np.arange(-window, window + 1)
    inside = np.abs(j) < d
    # sign-symmetric sampling keeps parity exact
    ja = np.abs(j)
    if parity is Parity.ODD:
        c = np.sign(j) * np.sin(x * ja)
    else:
        c = np.cos(x * ja)
    c = np.where(inside, c, 0.0)
    valid = None
    if lam0 is not None:
        valid = abs(lam0) * omega_c / (2 * hopping) >= threshold if hopping > 0 else True
    energy = float(dispersion(x, omega_c, hopping))
    return ResonantStateSolution(x, parity, int(m), AmplitudeVector(j, c).normalized(), energy, valid)


def quantization_solve(
    branch: QuantizationBranch,
    lam0: float,
    d: int,
    omega_c: float = 1.0,
    hopping: float = 0.01,
    mode_index: Optional[int] = None,
    threshold: float = RESONANCE_THRESHOLD,
    window: Optional[int] = None,
) -> StateResult:
    """Solve one branch of the two-cavity quantization condition.

    Bound branches return a :class:`BoundStateSolution` (decay ``y > 0``)
    or :class:`NoState`; the ``y = 0`` branch needs ``mode_index`` and
    returns a resonant state if the detuning is large enough.
    """
    if int(d) != d or d < 1:
        raise ModelError(f"d must be a positive integer, got {d}")
    branch = QuantizationBranch(branch.root_sign, branch.x_class)
    if branch.x_class is XClass.REAL:
        if mode_index is None:
            raise ModelError("the y=0 branch needs a mode index")
        state = resonant_state(mode_index, d, branch.parity, lam0, omega_c, hopping, threshold, window)
        if not state.valid:
            return NoState("weak detuning: only x = l*pi survives, giving c_j = 0")
        return state
    if lam0 == 0:
        raise ModelError("bound branches need a nonzero detuning")
    if hopping == 0:
        raise ModelError("zero hopping: decay constant undefined")
    y = _solve_decay(branch, lam0, d, omega_c, hopping)
    if y is None:
        reason = "zero solution only" if branch.root_sign is RootSign.POSITIVE else "no positive solution"
        return NoState(reason)
    alternating = branch.x_class is XClass.ODD_PI
    sign = 1.0 if alternating else -1.0
    energy = omega_c + sign * 2 * hopping * math.cosh(y)
    profile = bound_profile_double(y, d, branch.parity, window, alternating)
    return BoundStateSolution(energy, y, branch.parity, profile, "above_band" if alternating else "below_band", branch)


def double_bound_states(lam0: float, d: int, omega_c: float = 1.0, hopping: float = 0.01, window: Optional[int] = None) -> list[BoundStateSolution]:
    """Every bound state of the two-cavity chain, from all four bound branches."""
    out = []
    for branch in all_branches():
        if branch.x_class is XClass.REAL:
            continue
        state = quantization_solve(branch, lam0, d, omega_c, hopping, window=window)
        if state:
            out.append(state)
    return out


@dataclass(frozen=True)
class CoefficientRatios:
    a_over_b: complex
    c_over_b: complex
    d_over_b: complex
    c_over_b_right: complex
    consistency_residual: float


def coefficient_ratios(k: complex, lam0: float, d: int, omega_c: float = 1.0, hopping: float = 0.01) -> CoefficientRatios:
    """Amplitude ratios of the bound-state ansatz at complex wave vector ``k``.

    ``a_over_b`` and ``c_over_b`` come from matching at ``-d``; ``d_over_b``
    and ``c_over_b_right`` from ``+d``.  ``consistency_residual`` is
    ``|(lam0 w)^2 e^{4ikd} - (lam0 w - 2iJ sin k)^2|``, zero on a solution.
    """
    if lam0 == 0:
        raise ModelError("coefficient ratios need a nonzero detuning")
    k = complex(k)
    v = lam0 * omega_c
    g = 2j * hopping * np.sin(k)
    a_b = g / v * np.exp(-2j * k * d)
    c_b = (g - v) / v * np.exp(-2j * k * d)
    c_b_right = v / (g - v) * np.exp(2j * k * d)
    d_b = -g / (g - v)
    resid = abs(v * v * np.exp(4j * k * d) - (v - g) ** 2)
    return CoefficientRatios(complex(a_b), complex(c_b), complex(d_b), complex(c_b_right), float(resid))
