"""Independent numerical checks: dense diagonalization and wavepacket scattering."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .lattice import AmplitudeVector, Boundary, Impurity, LatticeSpec, ModelError, build_hamiltonian

MAX_DENSE = 10_000


class EigensolverError(RuntimeError):
    pass


class IncompleteRunError(RuntimeError):
    """The packet had not left the impurity region by the end of the run."""

    def __init__(self, message: str, run: "WavepacketRun"):
        super().__init__(message)
        self.run = run


@dataclass(frozen=True)
class SpectrumResult:
    """Sorted eigenvalues with eigenvectors in the columns of ``eigenvectors``.

    ``parities`` is set ("even"/"odd" per state) when the model is mirror
    symmetric and was diagonalized block-wise.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    sites: np.ndarray = field(repr=False)
    parities: Optional[tuple[str, ...]] = None

    def vector(self, i: int) -> AmplitudeVector:
        return AmplitudeVector(self.sites, self.eigenvectors[:, i])

    def count_in(self, low: float, high: float) -> int:
        return int(np.count_nonzero((self.eigenvalues >= low) & (self.eigenvalues <= high)))

    def max_residual(self, h: np.ndarray) -> float:
        """``max_i ||H v_i - e_i v_i||``."""
        r = h @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return float(np.max(np.linalg.norm(r, axis=0)))

    def orthonormality_defect(self) -> float:
        v = self.eigenvectors
        return float(np.max(np.abs(v.T @ v - np.eye(v.shape[1]))))


def _fix_signs(v: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs


def _parity_basis(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal even/odd bases (columns) for ``n`` sites centred on 0."""
    h = (n - 1) // 2
    even = np.zeros((n, h + 1))
    odd = np.zeros((n, h))
    even[h, 0] = 1.0
    s = 1 / math.sqrt(2)
    for j in range(1, h + 1):
        even[h + j, j] = even[h - j, j] = s
        odd[h + j, j - 1] = s
        odd[h - j, j - 1] = -s
    return even, odd


def diagonalize(spec: LatticeSpec, use_parity: bool = True) -> SpectrumResult:
    """Full spectrum of the finite lattice.

    Mirror-symmetric models are split into even and odd blocks first, so
    that near-degenerate parity partners come out unmixed.  Each eigenvector
    has its largest-magnitude component positive.
    """
    if spec.n_sites > MAX_DENSE:
        raise ModelError(f"dense path limited to {MAX_DENSE} sites, got {spec.n_sites}")
    h = build_hamiltonian(spec)
    try:
        if use_parity and spec.is_mirror_symmetric():
            even, odd = _parity_basis(spec.n_sites)
            we, ve = np.linalg.eigh(even.T @ h @ even)
            wo, vo = np.linalg.eigh(odd.T @ h @ odd)
            w = np.concatenate([we, wo])
            v = np.hstack([even @ ve, odd @ vo])
            labels = np.array(["even"] * len(we) + ["odd"] * len(wo))
            order = np.argsort(w, kind="stable")
            w, v, labels = w[order], v[:, order], tuple(labels[order])
        else:
            w, v = np.linalg.eigh(h)
            labels = None
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigh failed for N={spec.n_sites}: {exc}") from exc
    return SpectrumResult(w, _fix_signs(v), spec.sites, labels)


# ---------------------------------------------------------------- wavepackets


@dataclass(frozen=True)
class WavepacketRun:
    k0: float
    width: float
    duration: float
    times: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)
    region: np.ndarray = field(repr=False)
    between: np.ndarray = field(repr=False)
    norm: np.ndarray = field(repr=False)
    T_measured: float
    R_measured: float
    residual: float

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norm - 1.0)))


def gaussian_packet(sites: np.ndarray, k0: float, width: float, x0: float) -> np.ndarray:
    """Normalized ``exp(-(j-x0)^2 / 4 sigma^2) exp(i k0 j)``."""
    j = np.asarray(sites, dtype=float)
    psi = np.exp(-((j - x0) ** 2) / (4 * width**2) + 1j * k0 * j)
    return psi / np.linalg.norm(psi)


def plan_packet_run(
    impurities: Sequence[Impurity],
    k0: float,
    width: float = 20.0,
    omega_c: float = 1.0,
    hopping: float = 0.01,
    launch: float = 7.0,
) -> tuple[LatticeSpec, float, float]:
    """Open lattice, launch site and duration (units of 1/J) for one pass.

    The packet starts ``launch * width`` left of the leftmost impurity and
    runs until its centre is equally far right of the rightmost one; the
    chain is long enough that the lattice ends stay out of reach.
    """
    if not 0 < k0 < math.pi:
        raise ModelError(f"k0 must lie in (0, pi), got {k0}")
    lo = min(i.site for i in impurities)
    hi = max(i.site for i in impurities)
    gap = launch * width
    travel = (hi - lo) + 2 * gap
    duration = travel / (2 * math.sin(k0))
    half = int(math.ceil(max(abs(lo), abs(hi)) + 2 * gap + 2 * width))
    spec = LatticeSpec(2 * half + 1, omega_c, hopping, tuple(impurities), Boundary.OPEN)
    return spec, lo - gap, duration


def evolve_packet(
    spec: LatticeSpec,
    k0: float,
    width: float = 20.0,
    x0: float = -140.0,
    duration: float = 140.0,
    n_samples: int = 201,
    spectrum: Optional[SpectrumResult] = None,
) -> WavepacketRun:
    """Exact spectral evolution of a Gaussian packet; ``duration`` in units of 1/J.

    T and R are the probabilities right of the rightmost and left of the
    leftmost impurity at the final time; the impurity region (widened by
    ``5 width / 4``) must hold less than 1e-3 by then.
    """
    if not 0 < k0 < math.pi:
        raise ModelError(f"k0 must lie in (0, pi), got {k0}")
    if spec.hopping <= 0:
        raise ModelError("wavepacket runs need J > 0")
    sites = spec.sites
    imp = [i.site for i in spec.impurities] or [0]
    lo, hi = min(imp), max(imp)
    psi0 = gaussian_packet(sites, k0, width, x0)
    at_imp = np.abs(psi0[[spec.index(j) for j in imp]]) ** 2
    if at_imp.max() >= 1e-8:
        raise ModelError(f"packet overlaps the impurities at launch (max prob {at_imp.max():.2e})")
    if spectrum is None:
        spectrum = diagonalize(spec, use_parity=False)
    vals = spectrum.eigenvalues - spec.omega_c  # global phase only
    coeff = spectrum.eigenvectors.T @ psi0
    times = np.linspace(0.0, duration / spec.hopping, n_samples)
    psi_t = spectrum.eigenvectors @ (np.exp(-1j * np.outer(vals, times)) * coeff[:, None])
    prob = np.abs(psi_t) ** 2
    margin = 5 * width / 4
    left = prob[sites < lo].sum(axis=0)
    right = prob[sites > hi].sum(axis=0)
    between = prob[(sites >= lo) & (sites <= hi)].sum(axis=0)
    region = prob[(sites >= lo - margin) & (sites <= hi + margin)].sum(axis=0)
    norm = prob.sum(axis=0)
    run = WavepacketRun(
        k0, width, duration, times * spec.hopping, left, right, region, between, norm,
        float(right[-1]), float(left[-1]), float(between[-1]),
    )
    if region[-1] >= 1e-3:
        raise IncompleteRunError(f"packet still in the impurity region (p={region[-1]:.3e}); extend duration", run)
    return run


# ------------------------------------------------------------------- matching


@dataclass(frozen=True)
class MatchEntry:
    prediction: int
    eigen_index: Optional[int]
    predicted_energy: float
    numerical_energy: Optional[float]
    energy_error: Optional[float]
    fidelity: Optional[float]
    passed: bool


@dataclass(frozen=True)
class MatchReport:
    entries: tuple[MatchEntry, ...]
    energy_tol: float
    fidelity_tol: float

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "energy_tol": self.energy_tol,
            "fidelity_tol": self.fidelity_tol,
            "entries": [e.__dict__ for e in self.entries],
        }


def match_bound_states(
    spectrum: SpectrumResult,
    predictions: Sequence,
    energy_tol: float = 1e-9,
    fidelity_tol: float = 1e-6,
) -> MatchReport:
    """Greedily pair each prediction with the nearest unused eigenvalue.

    When both sides carry a parity, only same-parity eigenstates are
    candidates.  Fidelity is ``|<pred|num>|^2`` with the prediction's profile
    restricted to the lattice sites.
    """
    used: set[int] = set()
    entries = []
    for p, pred in enumerate(predictions):
        parity = getattr(pred, "parity", None)
        parity = getattr(parity, "value", parity)
        candidates = [
            i for i in range(len(spectrum.eigenvalues))
            if i not in used and (spectrum.parities is None or parity is None or spectrum.parities[i] == parity)
        ]
        if not candidates:
            entries.append(MatchEntry(p, None, float(pred.energy), None, None, None, False))
            continue
        best = min(candidates, key=lambda i: abs(spectrum.eigenvalues[i] - pred.energy))
        used.add(best)
        err = float(abs(spectrum.eigenvalues[best] - pred.energy))
        u = pred.profile.on_sites(spectrum.sites)
        v = spectrum.eigenvectors[:, best]
        fid = float(abs(np.vdot(u, v)) ** 2 / (np.vdot(u, u).real * np.vdot(v, v).real))
        ok = err < energy_tol and fid > 1 - fidelity_tol
        entries.append(MatchEntry(p, best, float(pred.energy), float(spectrum.eigenvalues[best]), err, fid, ok))
    return MatchReport(tuple(entries), energy_tol, fidelity_tol)
