"""End-to-end acceptance checks shared by the test suite and ``ccarray verify-all``."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import hardware, oracle, scattering, spectral
from .lattice import Impurity, LatticeSpec

OMEGA_C, J = 1.0, 0.01


@dataclass
class Check:
    number: int
    name: str
    passed: bool
    elapsed: float
    limit: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name} ({self.elapsed:.3f}s / {self.limit:g}s)"


def _timed(number: int, name: str, limit: float, body: Callable[[], tuple[bool, dict]]) -> Check:
    t0 = time.perf_counter()
    ok, details = body()
    elapsed = time.perf_counter() - t0
    details["within_runtime"] = elapsed < limit
    return Check(number, name, bool(ok) and elapsed < limit, elapsed, limit, details)


def check_unitarity(seed: int = 0, samples: int = 1000) -> Check:
    def body():
        rng = np.random.default_rng(seed)
        worst_single = worst_double = worst_closed = 0.0
        for _ in range(samples):
            k, lam = rng.uniform(0, math.pi), rng.uniform(-1, 3)
            s = scattering.reflect_single(k, lam, OMEGA_C, J)
            worst_single = max(worst_single, abs(s.R + s.T - 1))
        for _ in range(samples):
            k, lam, d = rng.uniform(0, math.pi), rng.uniform(-1, 3), int(rng.integers(1, 11))
            s = scattering.reflect_double(k, lam, d, OMEGA_C, J)
            worst_double = max(worst_double, abs(s.R + s.T - 1))
            closed = scattering.reflection_double_closed_form(k, lam, d, OMEGA_C, J)
            worst_closed = max(worst_closed, abs(closed - s.r))
        ok = worst_single < 1e-10 and worst_double < 1e-10 and worst_closed < 1e-10
        return ok, dict(max_single=worst_single, max_double=worst_double, max_closed_form_gap=worst_closed)

    return _timed(1, "unitarity R+T=1 (single, double, closed-form cross-check)", 1.0, body)


def check_symmetry() -> Check:
    def body():
        k = np.linspace(-math.pi, math.pi, 100)[:, None]
        lam = np.linspace(-1, 3, 100)[None, :]
        R = lambda kk, ll: scattering.reflection_coefficient(kk, ll, OMEGA_C, J)
        gaps = dict(
            k_to_minus_k=float(np.max(np.abs(R(k, lam) - R(-k, lam)))),
            about_half_pi=float(np.max(np.abs(R(math.pi / 2 - k, lam) - R(math.pi / 2 + k, lam)))),
            lam_to_minus_lam=float(np.max(np.abs(R(k, lam) - R(k, -lam)))),
        )
        return all(v < 1e-12 for v in gaps.values()), gaps

    return _timed(2, "reflection symmetries on 100x100 grid", 1.0, body)


def check_band_pole_equivalence() -> Check:
    def body():
        details, ok = {}, True
        for lam in (0.2, -0.2):
            roots = spectral.band_pole_roots(lam, 21, OMEGA_C, J)
            eig = oracle.diagonalize(LatticeSpec.single(21, lam, omega_c=OMEGA_C, hopping=J)).eigenvalues
            above = int(np.sum(roots > OMEGA_C + 2 * J))
            below = int(np.sum(roots < OMEGA_C - 2 * J))
            gap = float(max(np.min(np.abs(eig - r)) for r in roots))
            side_ok = (above, below) == ((1, 0) if lam > 0 else (0, 1))
            ok &= side_ok and gap < 1e-9
            details[f"lambda={lam}"] = dict(above=above, below=below, n_roots=len(roots), max_root_eig_gap=gap)
        return ok, details

    return _timed(3, "band-pole roots vs diagonalization (N=21)", 1.0, body)


def check_single_bound_state() -> Check:
    def body():
        state = spectral.bound_state_single(0.2, OMEGA_C, J)
        spec = LatticeSpec.single(201, 0.2, omega_c=OMEGA_C, hopping=J)
        report = oracle.match_bound_states(oracle.diagonalize(spec), [state], 1e-9, 1e-6)
        entry = report.entries[0]
        peak = int(state.profile.sites[np.argmax(state.profile.probabilities)])
        ok = report.passed and peak == 0
        return ok, dict(energy=state.energy, energy_error=entry.energy_error, fidelity=entry.fidelity, peak_site=peak)

    return _timed(4, "single-cavity bound state vs N=201 oracle", 5.0, body)


def bisect_decay(lam0: float, d: int, positive: bool) -> float:
    """Plain scan-and-bisect root of the ``x = 0`` decay equation."""
    sign = 1.0 if positive else -1.0
    g = lambda y: sign * math.exp(-2 * d * y) - 1 - 2 * J / (lam0 * OMEGA_C) * math.sinh(y)
    grid = np.linspace(1e-3, 20, 20001)
    vals = [g(y) for y in grid]
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa * fb <= 0:
            break
    else:
        raise RuntimeError("no sign change found")
    for _ in range(200):
        mid = 0.5 * (a + b)
        if g(a) * g(mid) <= 0:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)


def check_double_bound_states() -> Check:
    def body():
        lam0, d = -0.2, 5
        odd = spectral.quantization_solve(spectral.QuantizationBranch("positive", "x=2n*pi"), lam0, d, OMEGA_C, J)
        even = spectral.quantization_solve(spectral.QuantizationBranch("negative", "x=2n*pi"), lam0, d, OMEGA_C, J)
        y0_ref, y1_ref = bisect_decay(lam0, d, True), bisect_decay(lam0, d, False)
        spec = LatticeSpec.double(201, lam0, d, omega_c=OMEGA_C, hopping=J)
        report = oracle.match_bound_states(oracle.diagonalize(spec), [odd, even], 1e-8, 1e-6)
        parity_defects = [odd.profile.parity_defect("odd"), even.profile.parity_defect("even")]
        details = dict(
            y0=odd.decay,
            y1=even.decay,
            y0_vs_printed=abs(odd.decay - 2.998),
            y0_vs_bisection=abs(odd.decay - y0_ref),
            y1_vs_bisection=abs(even.decay - y1_ref),
            y0_minus_y1=abs(odd.decay - even.decay),
            energy_errors=[e.energy_error for e in report.entries],
            parity_defects=parity_defects,
        )
        ok = (
            details["y0_vs_printed"] < 1e-3
            and details["y0_vs_bisection"] < 1e-10
            and details["y1_vs_bisection"] < 1e-10
            and details["y0_minus_y1"] < 1e-6
            and all(e.energy_error is not None and e.energy_error < 1e-8 for e in report.entries)
            and max(parity_defects) <= 1e-12
        )
        return ok, details

    return _timed(5, "two-cavity decay roots, energies and parity", 5.0, body)


def _dirichlet_block(d: int) -> np.ndarray:
    n = 2 * d - 1
    return OMEGA_C * np.eye(n) - J * (np.eye(n, k=1) + np.eye(n, k=-1))


def check_resonant_states() -> Check:
    def body():
        d, m = 5, 2
        details, ok = {}, True
        for parity, expected in (("odd", 2 * math.pi / 5), ("even", math.pi / 2)):
            st = spectral.resonant_state(m, d, parity, omega_c=OMEGA_C, hopping=J)
            outside = st.profile.values[np.abs(st.profile.sites) >= d]
            inner = st.profile.on_sites(np.arange(-d + 1, d))
            resid = float(np.max(np.abs(_dirichlet_block(d) @ inner - st.energy * inner)))
            x_gap = abs(st.x - expected)
            ok &= x_gap < 1e-15 and np.all(outside == 0) and resid < 1e-12
            details[parity] = dict(x=st.x, x_gap=x_gap, block_residual=resid, max_outside=float(np.max(np.abs(outside))))
        return ok, details

    return _timed(6, "resonant states x=2pi/5 (odd), pi/2 (even)", 1.0, body)


def check_wavepacket_transport() -> Check:
    def body():
        k0, width = math.pi / 2, 20.0
        measured, details = [], {}
        ok = True
        for lam in (0.05, 0.1, 0.2):
            spec, x0, duration = oracle.plan_packet_run([Impurity(0, lam)], k0, width, OMEGA_C, J)
            run = oracle.evolve_packet(spec, k0, width, x0, duration)
            expected = scattering.reflect_single(k0, lam, OMEGA_C, J).T
            gap = abs(run.T_measured - expected)
            ok &= gap < 0.02
            measured.append(run.T_measured)
            details[f"lambda={lam}"] = dict(T_measured=run.T_measured, T_stationary=expected, gap=gap, norm_drift=run.norm_drift)
        monotone = all(a > b for a, b in zip(measured, measured[1:]))
        details["monotone_decreasing"] = monotone
        return ok and monotone, details

    return _timed(7, "wavepacket transmission vs stationary T(k0)", 60.0, body)


def check_hardware_limits() -> Check:
    def body():
        params = hardware.HardwareParams(E_J=1e-22, f=math.pi, C_s=0.0, l0=0.01, C0=1.6e-10, L0=4e-7)
        roots = hardware.dispersion_roots(params, 6).u
        branch = roots[roots > math.pi / 2]
        m = np.arange(1, len(branch) + 1)
        root_gap = float(np.max(np.abs(branch - m * math.pi)))
        exact = hardware.solve_mode_equation(0.0, 0.0, 5)
        exact_gap = float(np.max(np.abs(exact - np.arange(1, 6) * math.pi)))

        ic, phi = 1e-6, 0.7
        ic_phi = hardware.squid_critical_current(ic, phi)
        limit = hardware.PHI0 / (2 * math.pi * ic_phi)
        # x^2/6 stays below 1e-12 for x <= 1e-6, so the limit itself must be met
        small = [hardware.effective_inductance(x * ic_phi, ic, phi) for x in (0.0, 1e-9, 1e-7, 0.999e-6, 1.001e-6)]
        ind_gap = max(abs(v - limit) / limit for v in small)
        zero_flux = hardware.effective_inductance(0.0, ic, 0.0)
        zero_flux_gap = abs(zero_flux - hardware.PHI0 / (4 * math.pi * ic)) / zero_flux

        lam = hardware.detuning_range(2 * math.pi * 4, 2 * math.pi * 4.8, 2 * math.pi * 4)
        ok = (
            root_gap < 1e-10 and exact_gap < 1e-10 and ind_gap < 1e-12 and zero_flux_gap < 1e-12
            and lam.lam_min == 0.0 and lam.lam_max == 0.2
        )
        return ok, dict(
            root_gap=root_gap, exact_root_gap=exact_gap, inductance_rel_gap=ind_gap,
            zero_flux_rel_gap=zero_flux_gap, lambda_range=[lam.lam_min, lam.lam_max],
        )

    return _timed(8, "hardware limits (u=m*pi, L_eff(I->0), lambda in [0, 0.2])", 1.0, body)


def run_all(seed: int = 0) -> list[Check]:
    return [
        check_unitarity(seed),
        check_symmetry(),
        check_band_pole_equivalence(),
        check_single_bound_state(),
        check_double_bound_states(),
        check_resonant_states(),
        check_wavepacket_transport(),
        check_hardware_limits(),
    ]
