"""Single-excitation model of a coupled-cavity array.

Sites carry signed indices ``j = -(N-1)/2 ... (N-1)/2`` at every public
boundary; arrays are stored 0-based internally.  The lattice spacing is 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence, Union

import numpy as np


class ModelError(ValueError):
    """Raised for an invalid or degenerate lattice model."""


class Boundary(str, Enum):
    PERIODIC = "periodic"
    OPEN = "open"


@dataclass(frozen=True)
class Impurity:
    """A frequency-tunable cavity at ``site`` with frequency ``(1 + detuning) * omega_c``."""

    site: int
    detuning: float

    def __post_init__(self):
        if not np.isfinite(self.detuning) or self.detuning < -1:
            raise ModelError(f"detuning must be >= -1, got {self.detuning}")


@dataclass(frozen=True)
class LatticeSpec:
    n_sites: int
    omega_c: float = 1.0
    hopping: float = 0.01
    impurities: tuple[Impurity, ...] = ()
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        object.__setattr__(self, "impurities", tuple(self.impurities))
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        n = self.n_sites
        if int(n) != n or n < 3 or n % 2 == 0:
            raise ModelError(f"n_sites must be an odd integer >= 3, got {n}")
        if self.hopping < 0:
            raise ModelError(f"hopping must be nonnegative, got {self.hopping}")
        if self.omega_c <= 0:
            raise ModelError(f"omega_c must be positive, got {self.omega_c}")
        half = self.half_width
        seen = set()
        for imp in self.impurities:
            if not -half <= imp.site <= half:
                raise ModelError(f"impurity site {imp.site} outside [-{half}, {half}]")
            if imp.site in seen:
                raise ModelError(f"duplicate impurity site {imp.site}")
            seen.add(imp.site)

    @classmethod
    def single(cls, n_sites: int, lam: float, **kw) -> "LatticeSpec":
        """One detuned cavity at the central site."""
        return cls(n_sites, impurities=(Impurity(0, lam),), **kw)

    @classmethod
    def double(cls, n_sites: int, lam0: float, d: int, lam2: float | None = None, **kw) -> "LatticeSpec":
        """Detuned cavities at ``-d`` and ``+d``."""
        lam2 = lam0 if lam2 is None else lam2
        return cls(n_sites, impurities=(Impurity(-d, lam0), Impurity(d, lam2)), **kw)

    @property
    def half_width(self) -> int:
        return (self.n_sites - 1) // 2

    @property
    def sites(self) -> np.ndarray:
        h = self.half_width
        return np.arange(-h, h + 1)

    def index(self, j: int) -> int:
        """0-based array position of signed site ``j``."""
        if abs(j) > self.half_width:
            raise IndexError(f"site {j} outside lattice of {self.n_sites} sites")
        return j + self.half_width

    def detunings(self) -> np.ndarray:
        lam = np.zeros(self.n_sites)
        for imp in self.impurities:
            lam[self.index(imp.site)] = imp.detuning
        return lam

    def onsite(self) -> np.ndarray:
        return (1.0 + self.detunings()) * self.omega_c

    def is_mirror_symmetric(self) -> bool:
        """True when the detuning pattern is invariant under ``j -> -j``."""
        lam = self.detunings()
        return bool(np.array_equal(lam, lam[::-1]))

    def with_impurities(self, impurities: Iterable[Impurity]) -> "LatticeSpec":
        return LatticeSpec(self.n_sites, self.omega_c, self.hopping, tuple(impurities), self.boundary)


@dataclass(frozen=True)
class AmplitudeVector:
    """Complex amplitudes ``c_j`` on an explicit set of signed sites."""

    sites: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        sites = np.asarray(self.sites, dtype=int)
        values = np.asarray(self.values, dtype=complex)
        if sites.shape != values.shape or sites.ndim != 1:
            raise ValueError("sites and values must be 1-D arrays of equal length")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.sites)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        return float(np.sqrt(self.probabilities.sum()))

    def normalized(self) -> "AmplitudeVector":
        return AmplitudeVector(self.sites, self.values / self.norm())

    def at(self, j: int) -> complex:
        """Amplitude at signed site ``j`` (zero outside the stored window)."""
        hit = np.nonzero(self.sites == j)[0]
        return complex(self.values[hit[0]]) if hit.size else 0j

    def on_sites(self, sites: Sequence[int]) -> np.ndarray:
        """Amplitudes resampled onto ``sites``; sites not stored give zero."""
        sites = np.asarray(sites, dtype=int)
        out = np.zeros(sites.shape, dtype=complex)
        lookup = {int(j): i for i, j in enumerate(self.sites)}
        for n, j in enumerate(sites):
            i = lookup.get(int(j))
            if i is not None:
                out[n] = self.values[i]
        return out

    def parity_defect(self, parity: str) -> float:
        """Max of ``|c_j - s c_{-j}|`` with ``s = +1`` (even) or ``-1`` (odd)."""
        sign = {"even": 1.0, "odd": -1.0}[parity]
        mirrored = self.on_sites(-self.sites)
        return float(np.max(np.abs(self.values - sign * mirrored)))


def build_hamiltonian(spec: LatticeSpec) -> np.ndarray:
    """Dense real symmetric single-excitation Hamiltonian."""
    n = spec.n_sites
    h = np.diag(spec.onsite())
    off = -spec.hopping * np.ones(n - 1)
    h += np.diag(off, 1) + np.diag(off, -1)
    if spec.boundary is Boundary.PERIODIC:
        h[0, -1] = h[-1, 0] = -spec.hopping
    return h


def dispersion(k, omega_c: float = 1.0, hopping: float = 0.01):
    """Band frequency ``omega_c - 2 J cos k``."""
    return omega_c - 2.0 * hopping * np.cos(k)


def k_grid(spec: LatticeSpec) -> np.ndarray:
    """Wave vectors ``2 pi n / N`` with ``-N/2 < n <= N/2``, ascending."""
    if spec.boundary is not Boundary.PERIODIC:
        raise ModelError("the k grid is only defined for periodic boundaries")
    h = spec.half_width
    return 2.0 * np.pi * np.arange(-h, h + 1) / spec.n_sites


def _as_values(c: Union[AmplitudeVector, np.ndarray], spec: LatticeSpec) -> np.ndarray:
    if isinstance(c, AmplitudeVector):
        return c.on_sites(spec.sites)
    c = np.asarray(c, dtype=complex)
    if c.shape != (spec.n_sites,):
        raise ValueError(f"expected {spec.n_sites} amplitudes, got shape {c.shape}")
    return c


def recurrence_residual(c: Union[AmplitudeVector, np.ndarray], omega: float, spec: LatticeSpec) -> np.ndarray:
    """Per-site ``|-J (c[j+1] + c[j-1]) - (omega - (1 + lam_j) omega_c) c[j]|``.

    Neighbours beyond an open edge count as zero; a periodic spec wraps.
    """
    c = _as_values(c, spec)
    if spec.boundary is Boundary.PERIODIC:
        up, down = np.roll(c, -1), np.roll(c, 1)
    else:
        up = np.append(c[1:], 0)
        down = np.insert(c[:-1], 0, 0)
    res = -spec.hopping * (up + down) - (omega - spec.onsite()) * c
    return np.abs(res)


def dft_amplitudes(c: Union[AmplitudeVector, np.ndarray], spec: LatticeSpec) -> np.ndarray:
    """``(1/sqrt N) sum_j exp(i k j) c_j`` on :func:`k_grid` order."""
    ks = k_grid(spec)
    c = _as_values(c, spec)
    n, h = spec.n_sites, spec.half_width
    # position m = j + h;  exp(ikj) = exp(2 pi i n m / N) exp(-ikh)
    out = np.sqrt(n) * np.fft.ifft(c)
    nk = np.arange(-h, h + 1)
    return out[nk % n] * np.exp(-1j * ks * h)


def inverse_dft_amplitudes(ck: np.ndarray, spec: LatticeSpec) -> np.ndarray:
    """Inverse of :func:`dft_amplitudes`, returning site amplitudes."""
    ks = k_grid(spec)
    n, h = spec.n_sites, spec.half_width
    ck = np.asarray(ck, dtype=complex)
    nk = np.arange(-h, h + 1)
    full = np.zeros(n, dtype=complex)
    full[nk % n] = ck * np.exp(1j * ks * h)
    return np.fft.fft(full) / np.sqrt(n)
