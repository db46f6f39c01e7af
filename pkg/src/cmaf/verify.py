"""Invariant suites shared by the ``verify`` command and the test harness.

Each suite returns a :class:`SuiteResult` with the number of individual
checks, the largest raw deviation and the largest ratio of a deviation to
its own threshold (a suite passes when that ratio is at most 1).
Everything is deterministic: sample points are fixed and the one random
draw uses a seeded generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import asymptotics, background, bondi, cmaf_flow, sphere
from .linear_geometry import CaseKind, initial_leaf_state
from .reference import INITIAL_LEAF_POWERS, energy_momentum_constants, initial_leaf_table, k2_exact

__all__ = ["SuiteResult", "SUITES", "run_all", "STRATEGY_U_VALUES", "ASYMPTOTIC_DEGREES"]

CASES = (CaseKind.I, CaseKind.II)
STRATEGY_U_VALUES = (0.0, 0.5, 1.0, 5.0, 50.0)
ASYMPTOTIC_DEGREES = range(1, 9)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    count: int
    max_residual: float
    max_ratio: float
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        text = f"{flag} {self.name}: checks={self.count} max_residual={self.max_residual:.3e} max_ratio={self.max_ratio:.3e}"
        return text + (f" ({self.detail})" if self.detail else "")


class _Tally:
    """Accumulates deviations, each against the default or its own threshold."""

    def __init__(self, threshold: float) -> None:
        self.threshold = threshold
        self.count = 0
        self.worst = 0.0
        self.ratio = 0.0
        self.failures: list[str] = []

    def add(self, value: float, label: str = "", threshold: float | None = None) -> None:
        limit = self.threshold if threshold is None else threshold
        v = float(abs(value))
        self.count += 1
        self.worst = max(self.worst, v)
        self.ratio = max(self.ratio, v / limit)
        if not v <= limit:
            self.failures.append(label or str(self.count))

    def require(self, ok: bool, label: str) -> None:
        self.count += 1
        if not ok:
            self.failures.append(label)

    def result(self, name: str, detail: str = "") -> SuiteResult:
        if self.failures:
            shown = ", ".join(self.failures[:4])
            detail = (detail + "; " if detail else "") + f"failed: {shown}"
        return SuiteResult(name, not self.failures, self.count, self.worst, self.ratio, detail)


def suite_background(r0: float = 1.0) -> SuiteResult:
    """Outgoing-axis identities plus the constant Hawking mass off the axis."""
    t = _Tally(1e-12)
    for s in np.linspace(0.0, 100.0 * r0, 201)[1:]:
        f = background.background_fields(float(s), 0.0, r0)
        t.add((f.r - (r0 + s)) / f.r, f"r(s={s:g})")
        t.add(f.omega_sq - 1.0, "omega_sq")
        t.add(f.omegabar * r0, "omegabar")
        t.add((f.hawking_mass - 0.5 * r0) / r0, "hawking_mass")
    for s in np.linspace(-0.9 * r0, 5.0 * r0, 12):
        for sbar in np.linspace(-0.5 * r0, 5.0 * r0, 12):
            if s * math.exp((sbar + s + r0) / r0) <= -0.99 * r0:
                continue  # beyond the chart's future boundary
            f = background.background_fields(float(s), float(sbar), r0)
            t.add((f.hawking_mass - 0.5 * r0) / r0, "hawking_mass off-axis")
            t.add((f.mu - r0 / f.r**3) * r0**2, "mu")
            for name in background.VANISHING_COMPONENTS:
                t.require(getattr(f, name) == 0.0, name)
    return t.result("background")


def suite_initial_leaf(l_max: int = 16) -> SuiteResult:
    """Exact rational tables, the two lapse-derivative routes and the two Gauss curvatures."""
    t = _Tally(1e-12)
    for case in CASES:
        for l in range(l_max + 1):
            exact = initial_leaf_state(case, l, Fraction(1)).as_dict()
            table = initial_leaf_table(case.value, l)
            for key in INITIAL_LEAF_POWERS:
                t.require(exact[key] == table.get(key, 0), f"{case.value} l={l} {key}")
            st = initial_leaf_state(case, l, 1.0)
            t.add(st.gauss_curvature - st.gauss_curvature_gauss_eq, f"{case.value} l={l} K two ways")
            w_flow = cmaf_flow.initial_omegabar_from_lapse(case, l, 1.0)
            t.add(w_flow - st.omegabar, f"{case.value} l={l} omegabar two ways")
            lam = sphere.eigenvalue(l)
            if l >= 1:
                target = (3 - 3 * lam) / (2 * lam) if case is CaseKind.I else 9 / (2 * lam**2)
                t.add(st.omegabar - target, f"{case.value} l={l} omegabar closed form")
    return t.result("initial_leaf")


def suite_flow(u_max: float = 10.0, n_steps: int = 4096, r0: float = 1.0,
               l_max: int = 6, min_order: float = 3.8) -> SuiteResult:
    """RK4 trajectories against closed forms and the measured convergence order.

    The relative error is taken over the whole trajectory, normalised by its
    largest ``|delta_f|``; pointwise ratios are meaningless where the exact
    solution changes sign.
    """
    t = _Tally(1e-9)
    orders = []
    for case in CASES:
        for l in range(l_max + 1):
            states = cmaf_flow.evolve_mode(case, l, u_max, n_steps, r0)
            exact = [cmaf_flow.closed_form_f(case, l, st.u, r0) for st in states]
            scale = max(abs(x) for x in exact)
            err = max(abs(st.delta_f - x) for st, x in zip(states, exact))
            t.add(err / scale, f"{case.value} l={l}")
            order = cmaf_flow.convergence_order(case, l, u_max, r0=r0)
            if order is not None:
                orders.append(order)
                t.require(order >= min_order, f"{case.value} l={l} order {order:.3f}")
    detail = f"min order {min(orders):.3f} over {len(orders)} non-exact modes"
    return t.result("flow", detail)


def suite_strategy2(l_max: int = 8, r0: float = 1.0, tol: float = 1e-10) -> SuiteResult:
    """All ten residuals on exact states and detection of a 1% perturbation."""
    t = _Tally(tol)
    detected = 0
    probes = 0
    for case in CASES:
        for l in range(l_max + 1):
            for u in STRATEGY_U_VALUES:
                u = u * r0
                st = cmaf_flow.closed_form_state(case, l, u, r0)
                res = cmaf_flow.strategy2_residuals(case, l, u, st, r0)
                t.add(res.max_abs(), f"{case.value} l={l} u={u:g}")
                if l >= 1 and abs(st.delta_f) > 1e-8 * r0:
                    bumped = cmaf_flow.ModeState(u, 1.01 * st.delta_f, st.delta_a)
                    probes += 1
                    hit = cmaf_flow.strategy2_residuals(case, l, u, bumped, r0).max_abs() > 1e-4
                    detected += hit
                    t.require(hit, f"perturbed {case.value} l={l} u={u:g} undetected")
    return t.result("strategy2", f"1% perturbation detected in {detected}/{probes} states")


def suite_spectrum(l_neg: int = 32, l_asym: int = 64) -> SuiteResult:
    t = _Tally(1e-10)
    entries = asymptotics.spectrum(l_asym)
    t.require(entries[0].k_coeff_r0 == 0.0 and entries[1].k_coeff_r0 == 0.0, "k0 = k1 = 0")
    t.add(entries[2].k_coeff_r0 - k2_exact(), "k2")
    for e in entries[2:l_neg + 1]:
        t.require(e.k_coeff_r0 < 0, f"k_{e.l} < 0")
    for e in entries[2:]:
        t.add((e.k_coeff_r0 - (e.lam - 2) / 2 * e.g_coeff) / max(1.0, abs(e.k_coeff_r0)),
              f"consistency l={e.l}", threshold=1e-12)
    worst = asymptotics.asymptote_check(l_asym, 5)
    t.require(worst <= 1.1, f"asymptote {worst:.4f}")
    return t.result("spectrum", f"max |k/lam + 1/2| lam = {worst:.6f} for 5 <= l <= {l_asym}")


def _decay_slope(case, l: int, which: str, r0: float) -> float | None:
    g_lim, k_lim = asymptotics.limit_deltas(case, l, r0)
    lim = g_lim if which == "g" else k_lim
    us = np.geomspace(1e2, 1e4, 21) * r0
    devs = [abs(getattr(asymptotics.renormalized_deltas(case, l, float(u), r0=r0), f"{which}_u") - lim)
            for u in us]
    if max(devs) == 0.0:
        return None
    return float(np.polyfit(np.log(r0 + us), np.log(devs), 1)[0])


def suite_asymptotics(r0: float = 1.0) -> SuiteResult:
    """Distance to the limit at ``u = 1e4 r0`` and its ``r0 / r`` decay.

    For ``l = 1`` the curvature coefficient is identically zero, so there is
    no decay to measure.
    """
    t = _Tally(1e-3)
    exact = 0
    worst_slope = 0.0
    for case in CASES:
        for l in ASYMPTOTIC_DEGREES:
            g_lim, k_lim = asymptotics.limit_deltas(case, l, r0)
            d = asymptotics.renormalized_deltas(case, l, 1e4 * r0, r0=r0)
            t.add((d.g_u - g_lim) / abs(g_lim), f"g {case.value} l={l}")
            t.add((d.k_u - k_lim) / abs(k_lim) if k_lim else d.k_u, f"k {case.value} l={l}")
            for which in ("g", "k"):
                slope = _decay_slope(case, l, which, r0)
                if slope is None:
                    exact += 1
                    continue
                worst_slope = max(worst_slope, abs(slope + 1))
                t.require(abs(slope + 1) <= 0.05, f"slope {which} {case.value} l={l} {slope:.4f}")
    return t.result("asymptotics", f"max |slope + 1| = {worst_slope:.4f}; {exact} channels exactly at the limit")


def suite_bondi(r0: float = 1.0) -> SuiteResult:
    t = _Tally(1e-10)
    grid = bondi.default_grid()
    consts = dict(zip(CASES, energy_momentum_constants()))
    probes = [(0.0, (1.0, 0.0, 0.0)), (0.0, (0.0, 1.0, 0.0)), (0.0, (0.0, 0.0, 1.0)),
              (r0, (0.0, 0.0, 0.0)), (0.3 * r0, (0.2, -1.0, 2.5))]
    for case in CASES:
        for c0, c in probes:
            em = bondi.energy_momentum(bondi.KernelPerturbation(c0, c, case), grid, r0)
            t.add(em.dE / r0, f"{case.value} dE", threshold=1e-12)
            t.add(em.dMB / r0, f"{case.value} dMB", threshold=1e-12)
            for ci, dp in zip(c, em.dP):
                t.add((dp - ci * consts[case] * r0) / r0, f"{case.value} dP")
        m3, rank, null = bondi.momentum_surjectivity_check(grid, case, r0)
        t.add(np.max(np.abs(m3 - consts[case] * r0 * np.eye(3))) / r0, f"{case.value} matrix")
        t.require(rank == 3, f"{case.value} rank {rank}")
        t.add(np.max(np.abs(null - np.array([1.0, 0.0, 0.0, 0.0]))), f"{case.value} kernel")
    return t.result("bondi")


def suite_sphere(l_max: int = 8, seed: int = 0) -> SuiteResult:
    t = _Tally(1e-12)
    rng = np.random.default_rng(seed)
    grid = sphere.SphereGrid.for_degree(l_max)
    coeffs = sphere.SpectralField(l_max, rng.standard_normal(sphere.n_coeffs(l_max)))
    back = sphere.analyze(sphere.synthesize(coeffs, grid), l_max)
    t.add(np.max(np.abs(back.coeffs - coeffs.coeffs)), "round trip")
    for l in range(l_max + 1):
        for m in range(-l, l + 1):
            y = sphere.SpectralField.single(l, m, l_max=l_max)
            on_grid = sphere.synthesize(sphere.laplacian(y), grid).values
            direct = sphere.synthesize(y, grid).values
            t.add(np.max(np.abs(on_grid + sphere.eigenvalue(l) * direct)), f"spectral laplacian l={l}",
                  threshold=1e-8)
    # finite differences away from the poles as an independent oracle
    th = np.linspace(0.4, 2.7, 7)
    ph = np.linspace(0.1, 6.0, 9)
    T, P = np.meshgrid(th, ph, indexing="ij")
    for l in range(l_max + 1):
        for m in range(-l, l + 1):
            def fn(a, b, l=l, m=m):
                return sphere.real_harmonic(l, m, a, b)
            lap = sphere.fd_laplacian(fn, T, P)
            t.add(np.max(np.abs(lap + sphere.eigenvalue(l) * fn(T, P))), f"laplacian l={l}", threshold=1e-8)
            if l <= 6:
                dth, dph = sphere.fd_tracefree_hessian_div(fn, T, P)
                gth, gph = sphere.fd_gradient(fn, T, P)
                factor = sphere.tracefree_hessian_div_factor(l)
                dev = max(np.max(np.abs(dth - factor * gth)), np.max(np.abs(dph - factor * gph)))
                t.add(dev, f"divergence l={l}", threshold=1e-6)
    for x in sphere.first_harmonics_basis(grid):
        t.add(sphere.inner(x, x) - 4 * math.pi / 3, "first harmonics norm")
    return t.result("sphere")


SUITES = ("background", "initial_leaf", "flow", "strategy2", "spectrum", "asymptotics", "bondi", "sphere")


def run_all(r0: float = 1.0, u_max: float | None = None, n_steps: int = 4096,
            tol: float = 1e-10) -> list[SuiteResult]:
    u_max = 10.0 * r0 if u_max is None else u_max
    return [
        suite_background(r0),
        suite_initial_leaf(),
        suite_flow(u_max, n_steps, r0),
        suite_strategy2(r0=r0, tol=tol),
        suite_spectrum(),
        suite_asymptotics(r0),
        suite_bondi(r0),
        suite_sphere(),
    ]
