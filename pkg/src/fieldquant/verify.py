"""The named check battery behind the ``verify`` CLI command.

Each check records the identity it exercises, the measured value, and the
tolerance it must meet.  Symbolic checks demand exact zero expressions; the
discretized groups run on canonical natural-unit setups whose tolerances
are part of the library's contract.  A user-supplied config contributes the
symbolic Hamiltonian override, ad-hoc operator checks, and the quantization
scan parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import algebra as alg
from . import constants
from .config import SystemConfig, natural_config
from . import solutions as sol
from . import grids as gr
from . import propagate as prop
from . import symmetry as sym
from . import observables as obs


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    anchor: str


@dataclass
class VerifyReport:
    checks: list[CheckResult] = field(default_factory=list)

    def extend(self, items):
        self.checks.extend(items)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_passed else 1

    def as_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "value": c.value,
                 "tolerance": c.tolerance, "anchor": c.anchor}
                for c in self.checks
            ],
        }


def _check(name, value, tolerance, anchor, exact=False) -> CheckResult:
    passed = (value == 0) if exact else (value <= tolerance)
    return CheckResult(name=name, passed=bool(passed), value=float(value),
                       tolerance=0.0 if exact else float(tolerance), anchor=anchor)


# --- symbolic -----------------------------------------------------------------

def checks_symbolic(cfg: SystemConfig, op_text: str | None = None) -> list[CheckResult]:
    out = []
    cfg_1d = natural_config()
    cfg_par = natural_config(B=1.0, geometry="parallel_eb")
    h_1d = alg.hamiltonian_1d(cfg_1d)
    h_par = alg.hamiltonian_parallel(cfg_par)
    pairs = [
        ("px - q*E*t", alg.momentum_minus_force_time(), "H_1d", h_1d),
        ("i*hbar*dt", alg.energy_operator(), "H_1d", h_1d),
        ("px - q*E*t", alg.momentum_minus_force_time(), "H_par", h_par),
        ("py - m*wc*z", alg.gauge_momentum_y(), "H_par", h_par),
        ("pz", alg.momentum_z(), "H_par", h_par),
        ("i*hbar*dt", alg.energy_operator(), "H_par", h_par),
    ]
    if cfg.hamiltonian_override is not None:
        h_over = alg.parse_operator(cfg.hamiltonian_override)
        ops = alg.conserved_operators(cfg)
        pairs = [(name, op, "H_override", h_over) for name, op in ops.items()]
    for op_name, op, h_name, h in pairs:
        res = alg.heisenberg_residual(op, h)
        out.append(_check(
            f"symbolic.conserved[{op_name} | {h_name}]",
            0.0 if res.is_zero else 1.0, 0.0,
            f"[f,H]/(i*hbar) + df/dt = 0 for f = {op_name}, residual = {alg.to_text(res)}",
            exact=True))
    for j in range(6):
        res = alg.eigen_ladder_check(j)
        out.append(_check(
            f"symbolic.ladder[j={j}]",
            0.0 if res.is_zero else 1.0, 0.0,
            f"[f, Eop^{j + 1}] = i*hbar*q*E*{j + 1}*Eop^{j} exactly",
            exact=True))
    f_op = alg.momentum_minus_force_time()
    e_op = alg.energy_operator()
    prod = f_op * e_op
    defect = prod - alg.adjoint(prod)
    out.append(_check(
        "symbolic.adjoint[fE not hermitian]",
        0.0 if (not defect.is_zero and defect == alg.commutator(f_op, e_op)) else 1.0, 0.0,
        "fE - (fE)^dagger = [f, Eop] = i*hbar*q*E, so fE admits imaginary eigenvalues",
        exact=True))
    if op_text:
        op = alg.parse_operator(op_text)
        res = alg.heisenberg_residual(op, alg.system_hamiltonian(cfg))
        out.append(_check(
            f"symbolic.adhoc[{op_text}]",
            0.0 if res.is_zero else 1.0, 0.0,
            f"[f,H]/(i*hbar) + df/dt for f = {op_text}, residual = {alg.to_text(res)}",
            exact=True))
    return out


# --- canonical numeric setups ---------------------------------------------------

def _setup_electric():
    cfg = natural_config(L=8.0)
    grid = gr.Grid1D(8.0, 256, "periodic")
    return cfg, grid


def _setup_landau(npoints=64):
    cfg = natural_config(B=1.0, geometry="parallel_eb", L=8.0)
    grid = gr.landau_grid(cfg, npoints=npoints, ly=24.0)
    return cfg, grid


def checks_residual() -> list[CheckResult]:
    out = []
    cfg, grid = _setup_electric()
    phi = sol.electric_fundamental(cfg)
    for k in range(1, 5):
        t = gr.commensurate_time(cfg, grid, k)
        r = gr.schrodinger_residual(phi, grid, t, 1e-4)
        out.append(_check(
            f"residual.electric[t{k}]", r, 1e-6,
            "i*hbar dpsi/dt = H psi for the cubic-phase plane-wave solution"))
    t1 = gr.commensurate_time(cfg, grid, 1)
    amp = 1.0 / math.sqrt(cfg.box_length)
    bad = sol.AnalyticSolution(
        family="electric_1d_fundamental", ndim=1,
        fn=lambda x, t: amp * np.exp(1j * (np.asarray(t) ** 3 / 6.0
                                           + np.asarray(t) * np.asarray(x))),
        cfg=cfg, kmax=lambda t: (abs(t),))
    r_bad = gr.schrodinger_residual(bad, grid, t1, 1e-4)
    out.append(_check(
        "residual.electric[flipped-phase witness]",
        1.0 if r_bad <= 1e-1 else 0.0, 0.0,
        f"sign-flipped cubic phase is not a solution (residual {r_bad:.3f} > 0.1)",
        exact=True))
    return out


def checks_ladder_grid() -> list[CheckResult]:
    out = []
    cfg, pgrid = _setup_electric()
    grid = gr.Grid1D(8.0, 512, "dirichlet")
    t1 = gr.commensurate_time(cfg, pgrid, 1)
    h_step = 2e-5
    for j in range(5):
        state = sol.electric_ladder(cfg, j)
        r = gr.schrodinger_residual(state, grid, t1, h_step, scheme="fd4")
        out.append(_check(
            f"ladder.residual[j={j}]", r, 1e-5,
            f"Eop^{j} phi solves the time-dependent equation"))
    q, E, hbar = cfg.charge, cfg.electric, cfg.hbar
    band = slice(gr.DIRICHLET_BAND, -gr.DIRICHLET_BAND)
    for j in range(5):
        state = sol.electric_ladder(cfg, j)
        mid = gr.sample(state, grid, t1)
        plus = gr.sample(state, grid, t1 + h_step)
        minus = gr.sample(state, grid, t1 - h_step)
        e_action = 1j * hbar * (plus.values - minus.values) / (2.0 * h_step)
        px_e = -1j * hbar * gr._fd4_first(e_action, grid.dx, False)
        f_e = px_e - q * E * t1 * e_action
        target = 1j * hbar * q * E * (j + 1) * mid.values
        rel = (np.linalg.norm((f_e - target)[band])
               / np.linalg.norm(target[band]))
        out.append(_check(
            f"ladder.eigen[j={j}]", float(rel), 1e-6,
            f"f Eop (Eop^{j} phi) = i*hbar*q*E*{j + 1} * Eop^{j} phi on the grid"))
    return out


def checks_resummation() -> list[CheckResult]:
    out = []
    cfg, grid = _setup_electric()
    x = grid.x
    t, dt_shift = 1.0, 0.1
    target = sol.psi_electric_shifted(x, t, dt_shift, cfg)
    errors = []
    for J in range(11):
        approx = sol.superposition_taylor(x, t, dt_shift, J, cfg)
        errors.append(float(np.max(np.abs(approx - target))))
    out.append(_check(
        "resummation.sup_error[J=10]", errors[-1], 1e-6,
        "sum_j c_j Eop^j phi resums to phi(x, t - dt)"))
    monotone = all(errors[k + 1] <= errors[k] * (1 + 1e-12) for k in range(10))
    out.append(_check(
        "resummation.monotone[J=0..10]", 0.0 if monotone else 1.0, 0.0,
        "partial-sum error is nonincreasing in the truncation order",
        exact=True))
    return out


def checks_landau() -> list[CheckResult]:
    out = []
    cfg, grid = _setup_landau(npoints=96)  # n = 3 content needs the denser axes
    dy = gr.snap_shift(grid.y, 1.0)
    dz = gr.snap_offset(grid.z, 0.7)
    for n in range(4):
        e_n = sol.landau_level(n, cfg)
        fy = gr.sample(sol.parallel_family_y(cfg, n, dy, lz_box=grid.z.length), grid, 0.0)
        rel_y = abs(gr.expectation("H", fy, cfg) - e_n) / e_n
        out.append(_check(
            f"landau.energy[family-y n={n}]", rel_y, 1e-6,
            f"<H_yz> = hbar*wc*(n + 1/2) = {e_n}"))
        fz = gr.sample(sol.parallel_family_z(cfg, n, dz, ly_box=grid.y.length), grid, 0.0)
        rel_z = abs(gr.expectation("H", fz, cfg) - e_n) / e_n
        out.append(_check(
            f"landau.energy[family-z n={n}]", rel_z, 1e-6,
            f"<H_yz> = hbar*wc*(n + 1/2) = {e_n}"))
    period = prop.cyclotron_period(cfg)
    cfg64, grid64 = _setup_landau(npoints=64)
    dy64 = gr.snap_shift(grid64.y, 1.0)
    f0 = gr.sample(sol.parallel_family_y(cfg64, 0, dy64, lz_box=grid64.z.length),
                   grid64, 0.0)
    spec = prop.EvolutionSpec(dt=period / 512, steps=5120, cadence=512, method="split_yz")
    rec = prop.evolve(f0, spec, cfg64)
    fid_min = float(rec.column("fidelity").min())
    out.append(_check(
        "landau.split_fidelity[n=0, 10 periods]", 1.0 - fid_min, 1e-5,
        "split-step evolution holds the stationary family-y state"))
    return out


def checks_symmetry() -> list[CheckResult]:
    out = []
    cfg, grid = _setup_electric()
    t1 = gr.commensurate_time(cfg, grid, 1)
    phi = sol.electric_fundamental(cfg)
    dx_on = gr.snap_shift(grid, 0.9)
    out.append(_check(
        "symmetry.conjugation[Ux]",
        sym.conjugation_symmetry_check(sym.Unitary("Ux", dx_on), phi, grid, t1, cfg),
        1e-6, "H - Eop commutes with the conserved-momentum translation Ux"))
    out.append(_check(
        "symmetry.conjugation[Ut]",
        sym.conjugation_symmetry_check(sym.Unitary("Ut", 0.3), phi, grid, t1, cfg),
        1e-6, "H - Eop commutes with the time shift Ut"))
    cfgp, grid2 = _setup_landau()
    dy = gr.snap_shift(grid2.y, 0.5)
    dz_state = gr.snap_offset(grid2.z, 0.7)
    fam_y = sol.parallel_family_y(cfgp, 1, 0.0, lz_box=grid2.z.length)
    fam_z = sol.parallel_family_z(cfgp, 1, dz_state, ly_box=grid2.y.length)
    out.append(_check(
        "symmetry.conjugation[Uy]",
        sym.conjugation_symmetry_check(sym.Unitary("Uy", dy), fam_y, grid2, 0.4, cfgp),
        1e-6, "H - Eop commutes with the gauge-compensated y translation Uy"))
    out.append(_check(
        "symmetry.conjugation[Uz]",
        sym.conjugation_symmetry_check(sym.Unitary("Uz", gr.snap_shift(grid2.z, 0.8)),
                                       fam_z, grid2, 0.4, cfgp),
        1e-6, "H - Eop commutes with the z translation Uz"))
    broken = sym.conjugation_symmetry_check(
        sym.Unitary("Uy", dy, compensating_phase=False), fam_z, grid2, 0.4, cfgp)
    out.append(_check(
        "symmetry.conjugation[phase-stripped witness]",
        1.0 if broken <= 1e-2 else 0.0, 0.0,
        f"translation without the gauge phase breaks the symmetry (residual {broken:.3f} > 0.01)",
        exact=True))
    return out


def checks_quantization(cfg: SystemConfig, dx_shift: float = 2.0 * math.pi,
                        dt_grid=None, tol: float = 1e-8) -> list[CheckResult]:
    out = []
    scan_cfg = cfg if cfg.units.kind == "natural" else natural_config()
    if dt_grid is None:
        dt_grid = np.arange(1, 1001) * 0.005
    hits = []
    misses_ok = True
    phase_dev_hit = 0.0
    for dt_shift in dt_grid:
        phase = sym.invariance_phase(dx_shift, float(dt_shift), scan_cfg)
        report = sym.quantization_report(dx_shift, float(dt_shift), scan_cfg, tol)
        dev = abs(phase - 1.0)
        if report.is_quantized:
            hits.append(report.nearest)
            phase_dev_hit = max(phase_dev_hit, dev)
        elif dev < 1e-8:
            misses_ok = False
    out.append(_check(
        "quantization.phase_at_integers",
        phase_dev_hit, 1e-8,
        "Ux imprints exp(i q E dx dt / hbar) = 1 exactly at integer n"))
    out.append(_check(
        "quantization.no_false_hits",
        0.0 if misses_ok else 1.0, 0.0,
        "away from integer n the invariance phase stays away from 1",
        exact=True))
    # integers whose quantizing dt lands on the scan grid, by pure arithmetic
    dt_arr = np.asarray(list(dt_grid), dtype=float)
    q, E, hbar = scan_cfg.charge, scan_cfg.electric, scan_cfg.hbar
    n_max = int(math.floor(q * E * dx_shift * dt_arr.max() / (2.0 * math.pi * hbar))) + 1
    expected_hits = []
    for n in range(1, n_max + 1):
        dt_n = 2.0 * math.pi * hbar * n / (q * E * dx_shift)
        if np.min(np.abs(dt_arr - dt_n)) < 1e-12:
            expected_hits.append(n)
    out.append(_check(
        "quantization.integer_hits",
        0.0 if hits == expected_hits else 1.0, 0.0,
        f"scan marks exactly the integer points, n = {hits}",
        exact=True))
    report = sym.quantization_report(dx_shift, 1.0, scan_cfg)
    h_over_q2 = scan_cfg.units.h / scan_cfg.charge ** 2
    ulp_err = abs(report.resistance - h_over_q2 * report.n_real) \
        / math.ulp(abs(report.resistance) + 1.0)
    out.append(_check(
        "quantization.resistance_identity",
        ulp_err, 4.0,
        "R = V/I = (h/q^2) n, with V = E dx and I = q/dt"))
    rk = constants.PLANCK_SI / constants.ELEMENTARY_CHARGE_SI ** 2
    out.append(_check(
        "quantization.von_klitzing_si",
        abs(rk - constants.VON_KLITZING_OHM), constants.VON_KLITZING_OHM_TOL,
        "h/e^2 from the bundled exact SI constants matches the tabulated value"))
    return out


def checks_newton() -> list[CheckResult]:
    out = []
    cfg = natural_config(L=40.0)
    grid = gr.Grid1D(40.0, 1024, "dirichlet")
    x = grid.x
    psi0 = (2.0 * math.pi) ** -0.25 * np.exp(-x ** 2 / 4.0) + 0.0j
    f0 = gr.WaveField(grid, psi0, 0.0)
    rec = prop.evolve(f0, prop.EvolutionSpec(dt=5e-4, steps=2000, cadence=100), cfg)
    res = obs.newton_check(rec, cfg)
    out.append(_check(
        "newton.ehrenfest[E=1 gaussian]", res["max_residual"], 1e-6,
        "m d<v>/dt = q E along the wall-bounded numerical trajectory"))
    cfg8, _ = _setup_electric()
    phi = sol.electric_fundamental(cfg8)
    worst = 0.0
    for t in (0.0, 1.0, 2.0):
        prof = obs.probability_current_1d(phi, cfg8, t=t)
        expected = cfg8.charge * cfg8.electric * t / cfg8.mass * prof.density
        worst = max(worst, float(np.max(np.abs(prof.current - expected))))
    out.append(_check(
        "newton.current_closed_form", worst, 1e-10,
        "J = (q E t / m) |phi|^2 for the fundamental solution"))
    return out


def checks_propagator() -> list[CheckResult]:
    out = []
    cfg = natural_config(L=40.0)
    grid = gr.Grid1D(40.0, 256, "dirichlet")
    x = grid.x
    psi0 = (2.0 * math.pi) ** -0.25 * np.exp(-x ** 2 / 4.0) + 0.0j
    f0 = gr.WaveField(grid, psi0, 0.0)
    stepper = prop.CrankNicolson1D(grid, cfg, 1e-3)
    v = f0.values.copy()
    n0 = gr.norm(f0)
    for _ in range(10000):
        v = stepper.step(v)
    drift = abs(gr.norm(gr.WaveField(grid, v, 0.0)) - n0)
    out.append(_check(
        "propagator.cn_norm[1e4 steps]", drift, 1e-10,
        "Crank-Nicolson is exactly norm preserving"))
    f_big = gr.WaveField(gr.Grid1D(40.0, 1024, "dirichlet"),
                         (2.0 * math.pi) ** -0.25
                         * np.exp(-gr.Grid1D(40.0, 1024, "dirichlet").x ** 2 / 4.0) + 0.0j,
                         0.0)
    order_cn = prop.estimate_order(f_big, 0.5, "cn_1d", cfg, base_steps=64)
    out.append(_check(
        "propagator.order[cn_1d]", abs(order_cn - 2.0), 0.2,
        f"Richardson order estimate {order_cn:.3f} for the implicit midpoint scheme"))
    cfgp, grid2 = _setup_landau()
    rng = np.random.default_rng(7)
    shape = grid2.shape
    spec_f = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    mask = ((np.abs(grid2.y.wavenumbers)[:, None] <= 1.5)
            & (np.abs(grid2.z.wavenumbers)[None, :] <= 1.5))
    val = np.fft.ifft2(spec_f * mask) * np.exp(-grid2.y.x[:, None] ** 2 / 18.0)
    val /= math.sqrt(float(np.sum(np.abs(val) ** 2)) * grid2.cell)
    frand = gr.WaveField(grid2, val, 0.0)
    order_split = prop.estimate_order(frand, prop.cyclotron_period(cfgp),
                                      "split_yz", cfgp, base_steps=64)
    out.append(_check(
        "propagator.order[split_yz]", abs(order_split - 2.0), 0.2,
        f"Richardson order estimate {order_split:.3f} for Strang splitting"))
    return out


GROUPS = {
    "symbolic": None,       # built with config
    "residual": checks_residual,
    "ladder": checks_ladder_grid,
    "resummation": checks_resummation,
    "landau": checks_landau,
    "symmetry": checks_symmetry,
    "quantization": None,   # built with config
    "newton": checks_newton,
    "propagator": checks_propagator,
}


def run_verify(cfg: SystemConfig | None = None, filters=(),
               op_text: str | None = None) -> VerifyReport:
    """Run the named check groups; ``filters`` keeps groups whose name
    contains any of the given substrings."""
    if cfg is None:
        cfg = natural_config()
    report = VerifyReport()
    for group in GROUPS:
        if filters and not any(f in group for f in filters):
            continue
        if group == "symbolic":
            report.extend(checks_symbolic(cfg, op_text))
        elif group == "quantization":
            report.extend(checks_quantization(cfg))
        else:
            report.extend(GROUPS[group]())
    return report
