"""Symmetry unitaries of the two systems, the invariance phase they imprint,
and the resistance-quantization report.

The four transforms are exact shift-plus-phase maps:

    Ux: psi(x) -> exp(i q E t dx / hbar) psi(x - dx)
    Uy: psi(y, z) -> exp(i m wc z dy / hbar) psi(y - dy, z)
    Uz: psi(z) -> psi(z - dz)
    Ut: t -> t - dt   (solutions only; a bare grid field has no free t)

A state with a sharp conserved-momentum eigenvalue picks up the global
phase exp(i q E dx dt / hbar) under Ux; demanding invariance quantizes
q E dx dt / hbar in steps of 2 pi, which is resistance quantization in
units of h / q^2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig, cyclotron_frequency
from .solutions import (AnalyticSolution, electric_shifted, landau_level,
                        oscillator_eigenfunction, oscillator_scale,
                        phi_electric_parallel)
from .grids import (Grid1D, Grid2D, WaveField, GridMismatchError, landau_grid,
                    sample, apply_hamiltonian_1d, apply_hamiltonian_yz)

UNITARY_KINDS = ("Ux", "Uy", "Uz", "Ut")


@dataclass(frozen=True)
class Unitary:
    kind: str
    delta: float
    compensating_phase: bool = True  # False gives the broken-symmetry probe

    def __post_init__(self):
        if self.kind not in UNITARY_KINDS:
            raise ValueError(f"unknown unitary kind {self.kind!r}")
        if not math.isfinite(self.delta):
            raise ValueError("unitary parameter must be finite")


def _solution_transform(u: Unitary, solution: AnalyticSolution, cfg: SystemConfig):
    d = u.delta
    fn = solution.fn
    if u.kind == "Ut":
        if solution.ndim == 1:
            return lambda x, t: fn(x, np.asarray(t) - d)
        if solution.ndim == 2:
            return lambda y, z, t: fn(y, z, np.asarray(t) - d)
        return lambda x, y, z, t: fn(x, y, z, np.asarray(t) - d)
    if u.kind == "Ux":
        q, E, hbar = cfg.charge, cfg.electric, cfg.hbar
        if solution.ndim == 2:
            raise GridMismatchError("Ux needs a solution with an x coordinate")
        phase = (lambda t: np.exp(1j * q * E * np.asarray(t) * d / hbar)) \
            if u.compensating_phase else (lambda t: 1.0)
        if solution.ndim == 1:
            return lambda x, t: phase(t) * fn(np.asarray(x) - d, t)
        return lambda x, y, z, t: phase(t) * fn(np.asarray(x) - d, y, z, t)
    if u.kind == "Uy":
        wc = cyclotron_frequency(cfg)
        coeff = cfg.mass * wc * d / cfg.hbar
        phase = (lambda z: np.exp(1j * coeff * np.asarray(z))) \
            if u.compensating_phase else (lambda z: 1.0)
        if solution.ndim == 2:
            return lambda y, z, t: phase(z) * fn(np.asarray(y) - d, z, t)
        if solution.ndim == 3:
            return lambda x, y, z, t: phase(z) * fn(x, np.asarray(y) - d, z, t)
        raise GridMismatchError("Uy needs a solution with a y coordinate")
    # Uz
    if solution.ndim == 2:
        return lambda y, z, t: fn(y, np.asarray(z) - d, t)
    if solution.ndim == 3:
        return lambda x, y, z, t: fn(x, y, np.asarray(z) - d, t)
    raise GridMismatchError("Uz needs a solution with a z coordinate")


def _shift_axis(values: np.ndarray, grid_axis: Grid1D, delta: float, axis: int) -> np.ndarray:
    """Periodic lattice shift (exact roll when delta sits on the lattice,
    band-limited spectral interpolation otherwise)."""
    if grid_axis.boundary != "periodic":
        raise GridMismatchError("grid unitaries need periodic axes")
    cells = delta / grid_axis.dx
    if abs(cells - round(cells)) < 1e-9:
        return np.roll(values, round(cells), axis=axis)
    k = grid_axis.wavenumbers
    shape = [1] * values.ndim
    shape[axis] = k.size
    return np.fft.ifft(np.exp(-1j * k.reshape(shape) * delta)
                       * np.fft.fft(values, axis=axis), axis=axis)


def _field_transform(u: Unitary, f: WaveField, cfg: SystemConfig) -> WaveField:
    if u.kind == "Ut":
        raise ValueError("time shift requires analytic time dependence")
    if u.kind == "Ux":
        if not isinstance(f.grid, Grid1D):
            raise GridMismatchError("grid Ux acts on 1D fields")
        out = _shift_axis(f.values, f.grid, u.delta, 0)
        if u.compensating_phase:
            out = out * cmath.exp(1j * cfg.charge * cfg.electric * f.t * u.delta / cfg.hbar)
        return WaveField(f.grid, out, f.t)
    if not isinstance(f.grid, Grid2D):
        raise GridMismatchError("grid Uy/Uz act on 2D fields")
    if u.kind == "Uy":
        out = _shift_axis(f.values, f.grid.y, u.delta, 0)
        if u.compensating_phase:
            wc = cyclotron_frequency(cfg)
            zz = f.grid.z.x[None, :]
            out = out * np.exp(1j * cfg.mass * wc * zz * u.delta / cfg.hbar)
        return WaveField(f.grid, out, f.t)
    out = _shift_axis(f.values, f.grid.z, u.delta, 1)
    return WaveField(f.grid, out, f.t)


def apply_unitary(u: Unitary, target, cfg: SystemConfig):
    """Apply a symmetry unitary to an analytic solution or a grid field."""
    if isinstance(target, AnalyticSolution):
        tag = "" if u.compensating_phase else " (phase stripped)"
        return AnalyticSolution(
            family=target.family, ndim=target.ndim,
            fn=_solution_transform(u, target, cfg), cfg=target.cfg,
            n=target.n, shifts=target.shifts + ((u.kind, u.delta),),
            kmax=target.kmax,
            label=f"{u.kind}({u.delta:g}){tag} {target.label}",
            time_origin=target.time_origin + (u.delta if u.kind == "Ut" else 0.0))
    if isinstance(target, WaveField):
        return _field_transform(u, target, cfg)
    raise TypeError("apply_unitary expects an AnalyticSolution or WaveField")


# --- conjugation symmetry -----------------------------------------------------

def _pde_residual_field(solution: AnalyticSolution, grid, t: float,
                        dt_stencil: float, cfg: SystemConfig,
                        scheme: str = "spectral") -> WaveField:
    plus = sample(solution, grid, t + dt_stencil)
    minus = sample(solution, grid, t - dt_stencil)
    mid = sample(solution, grid, t)
    dpsi_dt = (plus.values - minus.values) / (2.0 * dt_stencil)
    if solution.ndim == 1:
        h_mid = apply_hamiltonian_1d(mid, cfg, scheme=scheme)
    else:
        h_mid = apply_hamiltonian_yz(mid, cfg)
    return WaveField(grid, h_mid.values - 1j * cfg.hbar * dpsi_dt, t)


def conjugation_symmetry_check(u: Unitary, solution: AnalyticSolution, grid,
                               t: float, cfg: SystemConfig,
                               dt_stencil: float = 1e-4,
                               scheme: str = "spectral") -> float:
    """|| (H - i hbar d/dt)(U psi) - U((H - i hbar d/dt) psi) ||_2 / ||psi||_2.

    Vanishes (to discretization accuracy) exactly when U is generated by a
    conserved operator; a phase-stripped translation fails loudly.
    """
    transformed = apply_unitary(u, solution, cfg)
    lhs = _pde_residual_field(transformed, grid, t, dt_stencil, cfg, scheme)
    if u.kind == "Ut":
        rhs = _pde_residual_field(solution, grid, t - u.delta, dt_stencil, cfg, scheme)
        rhs = WaveField(grid, rhs.values, t)
    else:
        base = _pde_residual_field(solution, grid, t, dt_stencil, cfg, scheme)
        rhs = _field_transform(u, base, cfg)
    ref = sample(solution, grid, t)
    return float(np.linalg.norm(lhs.values - rhs.values) / np.linalg.norm(ref.values))


# --- invariance phase and quantization -----------------------------------------

AMPLITUDE_FLOOR = 1e-6   # fraction of the peak below which ratios are ignored


def _phase_sample_points(state: AnalyticSolution, cfg: SystemConfig):
    L = cfg.box_length
    if state.ndim == 1:
        x = np.linspace(-0.45 * L, 0.45 * L, 64)
        return [(x, 0.0), (x, 0.31), (x, 0.73)]
    # full parallel product: sweep x and the oscillator neighborhoods
    shifts = dict(state.shifts)
    alpha = oscillator_scale(cfg)
    x = np.linspace(-0.45 * L, 0.45 * L, 16)
    y = shifts.get("dy", 0.0) + np.linspace(-2.0, 2.0, 5) / alpha
    z = shifts.get("dz", 0.0) + np.linspace(-2.0, 2.0, 5) / alpha
    xx, yy, zz = np.meshgrid(x, y, z, indexing="ij")
    return [(xx, yy, zz, 0.0), (xx, yy, zz, 0.41)]


def invariance_phase(dx_shift: float, dt_shift: float, cfg: SystemConfig,
                     state: AnalyticSolution | None = None,
                     tol: float = 1e-8) -> complex:
    """Measured global phase (Ux Psi) / Psi of the time-shifted solution.

    The ratio is taken at the largest-amplitude sample and verified constant
    over all samples above the amplitude floor; a non-constant ratio means
    the state is not a Ux eigenvector and raises ValueError.
    """
    if state is None:
        state = electric_shifted(cfg, dt_shift)
    ux = Unitary("Ux", dx_shift)
    transformed = apply_unitary(ux, state, cfg)
    ratios = []
    weights = []
    for point in _phase_sample_points(state, cfg):
        base = state.fn(*point)
        shifted = transformed.fn(*point)
        base = np.asarray(base, dtype=complex).ravel()
        shifted = np.asarray(shifted, dtype=complex).ravel()
        ratios.append(shifted)
        weights.append(base)
    base = np.concatenate(weights)
    shifted = np.concatenate(ratios)
    amax = np.abs(base).max()
    keep = np.abs(base) > AMPLITUDE_FLOOR * amax
    ratio = shifted[keep] / base[keep]
    ref = ratio[int(np.argmax(np.abs(base[keep])))]
    n_real = cfg.charge * cfg.electric * dx_shift * dt_shift / (2.0 * math.pi * cfg.hbar)
    spread = float(np.max(np.abs(ratio - ref)))
    if spread > tol * (1.0 + abs(n_real)):
        raise ValueError(
            f"state is not a Ux eigenvector: phase ratio varies by {spread:.3e}")
    return complex(ref)


@dataclass(frozen=True)
class QuantizationReport:
    dx: float
    dt: float
    electric: float
    charge: float
    n_real: float
    nearest: int
    is_quantized: bool
    tolerance: float
    voltage: float
    current: float
    resistance: float
    resistance_in_klitzing: float
    resistance_ohms: float | None = None


def quantization_report(dx_shift: float, dt_shift: float, cfg: SystemConfig,
                        tol: float = 1e-8) -> QuantizationReport:
    """Quantization verdict for q E dx dt / (2 pi hbar) plus the electrical
    reading: V = E dx, I = q / dt, R = V / I in units of h / q^2."""
    if dt_shift == 0:
        raise ValueError("undefined current: dt must be nonzero")
    q, E, hbar, h = cfg.charge, cfg.electric, cfg.hbar, cfg.units.h
    n_real = q * E * dx_shift * dt_shift / (2.0 * math.pi * hbar)
    nearest = round(n_real)
    tol_eff = tol * (1.0 + abs(n_real))  # condition of the phase grows with n
    voltage = E * dx_shift
    current = q / dt_shift
    resistance = voltage / current
    klitzing = resistance * q ** 2 / h
    # consistency guard: V/I must equal (h/q^2) n_real identically
    if abs(resistance - (h / q ** 2) * n_real) > 4 * math.ulp(abs(resistance) + 1.0):
        raise AssertionError("resistance bookkeeping out of ulp budget")
    return QuantizationReport(
        dx=dx_shift, dt=dt_shift, electric=E, charge=q,
        n_real=n_real, nearest=nearest,
        is_quantized=abs(n_real - nearest) <= tol_eff,
        tolerance=tol_eff,
        voltage=voltage, current=current, resistance=resistance,
        resistance_in_klitzing=klitzing,
        resistance_ohms=resistance if cfg.units.kind == "si" else None)


def scan_quantization(dx_shift: float, dt_values, cfg: SystemConfig,
                      tol: float = 1e-8):
    """Quantization reports over a dt scan; dt = 0 rows yield None."""
    reports = []
    for dt_shift in dt_values:
        if dt_shift == 0:
            reports.append(None)
        else:
            reports.append(quantization_report(dx_shift, dt_shift, cfg, tol))
    return reports


# --- the parallel-field superposition -------------------------------------------

MAX_SUPERPOSITION_N = 16


def build_parallel_superposition(a_coeffs, abar_coeffs, cfg: SystemConfig,
                                 grid: Grid2D | None = None) -> AnalyticSolution:
    """Closed-form superposition sum_n a_n Ut Ux Uy zeta_n
    + sum_n abar_n Ut Ux Uz zetabar_n, Gram-normalized on a transverse grid.

    zeta_n carries the unshifted oscillator along y; zetabar_n carries the
    gauge-twisted oscillator along z.  All components share the same
    plane-wave x factor, so the state is a sharp Ux eigenvector and its
    invariance phase is exp(i q E dx dt / hbar).
    """
    a_coeffs = np.asarray(a_coeffs, dtype=complex)
    abar_coeffs = np.asarray(abar_coeffs, dtype=complex)
    if a_coeffs.size > MAX_SUPERPOSITION_N or abar_coeffs.size > MAX_SUPERPOSITION_N:
        raise ValueError(f"at most {MAX_SUPERPOSITION_N} levels per family")
    if not np.any(a_coeffs) and not np.any(abar_coeffs):
        raise ValueError("empty superposition: all coefficients vanish")
    if not (np.all(np.isfinite(a_coeffs)) and np.all(np.isfinite(abar_coeffs))):
        raise ValueError("superposition coefficients must be finite")

    d = cfg.displacements
    wc = cyclotron_frequency(cfg)
    alpha = oscillator_scale(cfg)
    hbar, m, q, E = cfg.hbar, cfg.mass, cfg.charge, cfg.electric
    if grid is None:
        grid = landau_grid(cfg)
    ly, lz = grid.y.length, grid.z.length

    components = []   # (coefficient, energy, yz evaluator)
    for n, a_n in enumerate(a_coeffs):
        if a_n == 0:
            continue
        en = landau_level(n, cfg)

        def yz_y(y, z, n=n):
            phase = np.exp(1j * m * wc * np.asarray(z) * d.dy / hbar)
            return phase * oscillator_eigenfunction(
                n, alpha * (np.asarray(y) - d.dy), cfg) / math.sqrt(lz)

        components.append((complex(a_n), en, yz_y))
    for n, a_n in enumerate(abar_coeffs):
        if a_n == 0:
            continue
        en = landau_level(n, cfg)

        def yz_z(y, z, n=n):
            phase = np.exp(1j * m * wc * np.asarray(y) * (np.asarray(z) - d.dz) / hbar)
            return phase * oscillator_eigenfunction(
                n, alpha * (np.asarray(z) - d.dz), cfg) / math.sqrt(ly)

        components.append((complex(a_n), en, yz_z))

    # Gram matrix of the transverse parts; different Landau levels are
    # orthogonal, so the time phases never enter the norm
    yy = grid.y.x[:, None]
    zz = grid.z.x[None, :]
    sampled = [fn(yy, zz) for (_, _, fn) in components]
    gram = np.array([[np.sum(np.conj(si) * sj) * grid.cell for sj in sampled]
                     for si in sampled])
    cvec = np.array([c for (c, _, _) in components])
    total = float(np.real(np.conj(cvec) @ gram @ cvec))
    if total <= 0:
        raise ValueError("superposition has vanishing norm")
    scale = 1.0 / math.sqrt(total)

    def evaluator(x, y, z, t):
        t_eff = np.asarray(t, dtype=float) - d.dt
        common = (np.exp(1j * q * E * t_eff * d.dx / hbar)
                  * phi_electric_parallel(np.asarray(x) - d.dx, t_eff, cfg))
        acc = 0.0j
        for c, en, yz in components:
            acc = acc + c * np.exp(-1j * en * t_eff / hbar) * yz(y, z)
        return scale * common * acc

    return AnalyticSolution(
        family="parallel_superposition", ndim=3, fn=evaluator, cfg=cfg,
        shifts=(("dx", d.dx), ("dy", d.dy), ("dz", d.dz), ("dt", d.dt)),
        label="Gram-normalized two-family superposition",
        time_origin=d.dt)
