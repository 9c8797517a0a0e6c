"""Batch drivers behind the command line: verify, fuzz, sweep, optimize.

Randomness is derived from ``numpy.random.SeedSequence(seed)`` with one
spawned child per work item, so results do not depend on how items are
scheduled across workers.
"""
from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import ensembles
from .linalg import commutator, hermitian_norm, kron, operator_norm, projector
from .models import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    GaussianPacket,
    LatticeApparatus,
    STANDARD_Q_BASIS,
    modified_standard_model,
    modified_two_level_model,
    standard_model,
    two_level_apparatus_model,
    two_level_interaction,
)
from .oracles import lemma2_margin, min_error_given_fidelity
from .process import (
    DIM_S,
    BoundReport,
    MeasurementProcess,
    apparatus_states,
    bound_report,
    commutator_identity_check,
    correlation_function,
    heisenberg_drift_check,
    optimal_pointer,
    statistics_from_states,
)

DEFAULT_TOLERANCE = 1e-9
SWEEP_COLUMNS = (
    "fidelity", "p_error", "lhs", "fidelity_term", "drive_term", "slack", "correlation_integral",
)
NAMED_SYSTEMS = {
    "zero": np.zeros((2, 2), dtype=complex),
    "sigma_x": SIGMA_X,
    "sigma_y": SIGMA_Y,
    "sigma_z": SIGMA_Z,
}


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (8 * workers))))


# ---------------------------------------------------------------- verify


@dataclass
class Verification:
    report: BoundReport
    checks: dict[str, tuple[float, bool]]

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.checks.values())


def verify(p: MeasurementProcess, tolerance: float = DEFAULT_TOLERANCE) -> Verification:
    report = bound_report(p)
    rho0, rho1 = apparatus_states(p)
    actual, bound = heisenberg_drift_check(p)
    norm_c, elem = commutator_identity_check(p.h_s, p.q_basis)
    margins = {
        "theorem1_slack": report.slack,
        "lemma2_margin": lemma2_margin(report.fidelity, report.p_error),
        "corollary1_slack": report.corollary1_slack,
        "heisenberg_margin": bound - actual,
    }
    checks = {name: (float(m), bool(m >= -tolerance)) for name, m in margins.items()}
    gap = abs(norm_c - elem)
    checks["commutator_identity_gap"] = (float(gap), bool(gap <= 1e-10))
    trace_err = max(abs(np.trace(rho0).real - 1), abs(np.trace(rho1).real - 1))
    checks["apparatus_trace_error"] = (float(trace_err), bool(trace_err <= 1e-9))
    return Verification(report, checks)


# ---------------------------------------------------------------- fuzz


@dataclass(frozen=True)
class FuzzSample:
    index: int
    report: BoundReport
    lemma2_margin: float
    corollary1_margin: float
    heisenberg_margin: float
    contrapositive_margin: float | None


def fuzz_scenario(seed: int, index: int, n: int, dim_a: int | None, mode: str) -> MeasurementProcess:
    child = np.random.SeedSequence(seed).spawn(n)[index]
    return _fuzz_scenario_from(np.random.default_rng(child), dim_a, mode)


def _fuzz_scenario_from(rng, dim_a, mode):
    if mode == "commuting":
        return ensembles.random_commuting_process(rng, dim_a)
    if mode == "generic":
        return ensembles.random_process(rng, dim_a)
    raise ValueError(f"unknown fuzz mode {mode!r}")


def _fuzz_one(args) -> FuzzSample:
    index, child, dim_a, mode, z_samples = args
    rng = np.random.default_rng(child)
    p = _fuzz_scenario_from(rng, dim_a, mode)
    report = bound_report(p)
    rho0, rho1 = apparatus_states(p)
    lemma2 = cor1 = np.inf
    for _ in range(z_samples):
        stats = statistics_from_states(rho0, rho1, ensembles.random_pointer(rng, p.dim_a))
        lemma2 = min(lemma2, lemma2_margin(report.fidelity, stats.p_error))
        pe = stats.p_error
        rhs = 2 * report.h_s_norm * np.sqrt(max(pe - pe * pe, 0.0)) + report.drive_term
        cor1 = min(cor1, rhs - report.lhs)
    actual, bound = heisenberg_drift_check(p)
    contra = None
    if mode == "commuting" and report.h_s_norm > 0:
        contra = report.fidelity - report.lhs / report.h_s_norm
    return FuzzSample(index, report, float(lemma2), float(cor1), bound - actual, contra)


@dataclass
class FuzzSummary:
    n: int
    seed: int
    mode: str
    dim_a: int | None
    tolerance: float
    min_slack: float
    min_lemma2_margin: float
    min_corollary1_margin: float
    min_heisenberg_margin: float
    min_contrapositive_margin: float | None
    worst_index: int
    worst_report: BoundReport
    samples: list[FuzzSample] = field(repr=False)

    @property
    def worst_margin(self) -> float:
        vals = [self.min_slack, self.min_lemma2_margin, self.min_corollary1_margin,
                self.min_heisenberg_margin]
        if self.min_contrapositive_margin is not None:
            vals.append(self.min_contrapositive_margin)
        return min(vals)

    @property
    def ok(self) -> bool:
        return bool(self.worst_margin >= -self.tolerance)

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "samples"}
        d["ok"] = self.ok
        return d


def fuzz(
    n: int,
    dim_a: int | None = None,
    seed: int = 42,
    mode: str = "generic",
    z_samples: int = 8,
    tolerance: float = DEFAULT_TOLERANCE,
    workers: int = 1,
) -> FuzzSummary:
    if n < 1:
        raise ValueError("n must be >= 1")
    children = np.random.SeedSequence(seed).spawn(n)
    items = [(i, c, dim_a, mode, z_samples) for i, c in enumerate(children)]
    samples = _map(_fuzz_one, items, workers)

    def sample_worst(s: FuzzSample) -> float:
        vals = [s.report.slack, s.lemma2_margin, s.corollary1_margin, s.heisenberg_margin]
        if s.contrapositive_margin is not None:
            vals.append(s.contrapositive_margin)
        return min(vals)

    worst = min(samples, key=sample_worst)
    contra = [s.contrapositive_margin for s in samples if s.contrapositive_margin is not None]
    return FuzzSummary(
        n=n, seed=seed, mode=mode, dim_a=dim_a, tolerance=tolerance,
        min_slack=min(s.report.slack for s in samples),
        min_lemma2_margin=min(s.lemma2_margin for s in samples),
        min_corollary1_margin=min(s.corollary1_margin for s in samples),
        min_heisenberg_margin=min(s.heisenberg_margin for s in samples),
        min_contrapositive_margin=min(contra) if contra else None,
        worst_index=worst.index,
        worst_report=worst.report,
        samples=samples,
    )


# ---------------------------------------------------------------- sweep

SWEEP_MODELS = {
    "random": ("tau", "v_norm", "dim_a"),
    "two_level": ("lambda",),
    "modified_two_level": ("lambda",),
    "standard": ("tau", "width"),
    "modified_standard": ("tau", "width", "h_s_norm"),
}


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    steps: int
    scale: str = "linear"

    def values(self) -> list[float]:
        if self.steps < 1:
            raise ValueError(f"axis {self.name}: steps must be >= 1")
        if self.steps == 1:
            vals = [self.start]
        elif self.scale == "log":
            if self.start <= 0 or self.stop <= 0:
                raise ValueError(f"axis {self.name}: log scale needs positive bounds")
            vals = np.geomspace(self.start, self.stop, self.steps).tolist()
        elif self.scale == "linear":
            vals = np.linspace(self.start, self.stop, self.steps).tolist()
        else:
            raise ValueError(f"axis {self.name}: unknown scale {self.scale!r}")
        if self.name == "dim_a":
            vals = [int(round(v)) for v in vals]
        return vals


@dataclass(frozen=True)
class SweepSpec:
    model: str
    axes: tuple[Axis, ...]
    seed: int = 0
    samples_per_point: int = 1
    fixed: dict = field(default_factory=dict)
    n_times: int = 65

    def __post_init__(self):
        if self.model not in SWEEP_MODELS:
            raise ValueError(f"unknown sweep model {self.model!r}; choose from {sorted(SWEEP_MODELS)}")
        if not self.axes:
            raise ValueError("a sweep needs at least one axis")
        allowed = SWEEP_MODELS[self.model]
        for ax in self.axes:
            if ax.name not in allowed:
                raise ValueError(f"model {self.model!r} cannot sweep {ax.name!r}; allowed: {allowed}")
            ax.values()
        if self.samples_per_point < 1:
            raise ValueError("samples_per_point must be >= 1")

    @classmethod
    def from_dict(cls, doc: dict) -> SweepSpec:
        axes = tuple(Axis(**a) for a in doc["axes"])
        return cls(
            model=doc["model"],
            axes=axes,
            seed=int(doc.get("seed", 0)),
            samples_per_point=int(doc.get("samples_per_point", 1)),
            fixed=dict(doc.get("fixed", {})),
            n_times=int(doc.get("n_times", 65)),
        )

    def points(self) -> list[dict]:
        names = [a.name for a in self.axes]
        return [dict(zip(names, combo)) for combo in itertools.product(*(a.values() for a in self.axes))]


def _system_hamiltonian(value) -> np.ndarray:
    if isinstance(value, str):
        return NAMED_SYSTEMS[value]
    from .scenario_io import _matrix

    return _matrix(value, "fixed.h_s", 2)


def build_sweep_process(model: str, params: dict, rng: np.random.Generator | None = None) -> MeasurementProcess:
    """Construct the scenario for one sweep point; ``params`` merges fixed and swept values."""
    if model == "random":
        return ensembles.random_process(
            rng,
            dim_a=int(params.get("dim_a", 4)),
            tau=float(params.get("tau", 1.0)),
            v_norm=params.get("v_norm"),
        )
    if model == "two_level":
        return two_level_apparatus_model(float(params["lambda"]))
    if model == "modified_two_level":
        return modified_two_level_model(float(params["lambda"]), _system_hamiltonian(params.get("h_s", "sigma_x")))
    lattice = LatticeApparatus(int(params.get("n_sites", 256)), float(params.get("length", 32.0)))
    packet = GaussianPacket(0.0, float(params.get("width", 1.0)))
    tau = float(params.get("tau", 1.0))
    if model == "standard":
        return standard_model(lattice, packet, tau)
    h_dir = _system_hamiltonian(params.get("h_s", "sigma_x"))
    h_s = h_dir * (float(params.get("h_s_norm", 0.1)) / hermitian_norm(h_dir))
    proc, _ = modified_standard_model(lattice, packet, tau, h_s)
    return proc


def _sweep_row(args) -> list[float]:
    model, params, child, samples, n_times = args
    rng = np.random.default_rng(child)
    best = None
    for _ in range(samples if model == "random" else 1):
        p = build_sweep_process(model, params, rng)
        r = bound_report(p)
        if best is None or r.slack < best[1].slack:
            best = (p, r)
    p, r = best
    _, integral = correlation_function(p, np.linspace(0.0, p.tau, n_times))
    return [r.fidelity, r.p_error, r.lhs, r.fidelity_term, r.drive_term, r.slack, integral]


def _fmt(x) -> str:
    return repr(float(x)) if not isinstance(x, int) else str(x)


def sweep(spec: SweepSpec, workers: int = 1) -> str:
    """Run the grid and return CSV text (one row per grid point).

    For the ``random`` model each point draws ``samples_per_point`` scenarios
    and reports the one with the smallest slack.
    """
    points = spec.points()
    children = np.random.SeedSequence(spec.seed).spawn(len(points))
    items = [
        (spec.model, {**spec.fixed, **pt}, c, spec.samples_per_point, spec.n_times)
        for pt, c in zip(points, children)
    ]
    rows = _map(_sweep_row, items, workers)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([a.name for a in spec.axes] + list(SWEEP_COLUMNS))
    for pt, row in zip(points, rows):
        writer.writerow([_fmt(pt[a.name]) for a in spec.axes] + [_fmt(x) for x in row])
    return buf.getvalue()


# ---------------------------------------------------------------- optimize


@dataclass(frozen=True)
class OptimizationSpec:
    h_s: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), dtype=complex))
    q_basis: tuple = STANDARD_Q_BASIS
    v_max: float = 1.0
    tau_max: float = 10.0
    dim_a: int = 2
    restarts: int = 4
    max_iters: int = 4000
    seed: int = 0
    search_space: str = "full"
    hbar: float = 1.0

    def __post_init__(self):
        if self.v_max < 0 or self.tau_max <= 0:
            raise ValueError("need v_max >= 0 and tau_max > 0")
        if self.dim_a < 1 or self.restarts < 1 or self.max_iters < 1:
            raise ValueError("dim_a, restarts and max_iters must be positive")
        if self.search_space not in ("full", "commuting"):
            raise ValueError(f"unknown search space {self.search_space!r}")


def _hermitian_from_reals(x: np.ndarray, n: int) -> np.ndarray:
    iu = np.triu_indices(n)
    iu1 = np.triu_indices(n, 1)
    m = np.zeros((n, n), dtype=complex)
    k = len(iu[0])
    m[iu] = x[:k]
    m[iu1] += 1j * x[k:]
    return m + np.triu(m, 1).conj().T


def _reals_from_hermitian(h: np.ndarray) -> np.ndarray:
    n = h.shape[0]
    return np.concatenate([h[np.triu_indices(n)].real, h[np.triu_indices(n, 1)].imag])


class _Protocol:
    """Real parameterization of ``(V, Omega, tau)`` under the norm and time budgets."""

    def __init__(self, spec: OptimizationSpec):
        self.spec = spec
        self.n = DIM_S * spec.dim_a
        self.h_s = np.asarray(spec.h_s, dtype=complex)
        if spec.search_space == "full":
            self.n_v = self.n**2
        else:
            self.n_v = 2 * spec.dim_a**2
        self.size = self.n_v + 2 * spec.dim_a + 1

    def interaction(self, x: np.ndarray) -> np.ndarray:
        d = self.spec.dim_a
        if self.spec.search_space == "full":
            raw = _hermitian_from_reals(x[: self.n_v], self.n)
        else:
            b = _hermitian_from_reals(x[: d * d], d)
            c = _hermitian_from_reals(x[d * d: self.n_v], d)
            raw = kron(self.h_s, b) + kron(np.eye(DIM_S), c)
        norm = hermitian_norm(raw)
        if norm > self.spec.v_max:
            raw = raw * (self.spec.v_max / norm) if norm > 0 else raw * 0.0
        return 0.5 * (raw + raw.conj().T)

    def decode(self, x: np.ndarray) -> MeasurementProcess:
        d = self.spec.dim_a
        w = x[self.n_v: self.n_v + 2 * d]
        omega = w[:d] + 1j * w[d:]
        norm = np.linalg.norm(omega)
        omega = omega / norm if norm > 1e-300 else np.eye(d, dtype=complex)[0]
        tau = self.spec.tau_max * float(np.sin(x[-1]) ** 2)
        return MeasurementProcess(
            d, self.h_s, np.zeros((d, d)), self.interaction(x), self.spec.q_basis, omega, tau, self.spec.hbar,
        )

    def objective(self, x: np.ndarray) -> float:
        rho0, rho1 = apparatus_states(self.decode(x))
        return optimal_pointer(rho0, rho1)[1]

    def known_feasible(self) -> np.ndarray | None:
        """Two-level measurement embedded in the first two apparatus levels."""
        spec = self.spec
        if spec.search_space != "full" or spec.v_max <= 0 or spec.dim_a < 2:
            return None
        d = spec.dim_a
        lam = spec.v_max
        v2 = two_level_interaction(lam, spec.q_basis)
        v = np.zeros((self.n, self.n), dtype=complex)
        idx = [s * d + a for s in range(DIM_S) for a in range(2)]
        v[np.ix_(idx, idx)] = v2
        omega = np.zeros(d, dtype=complex)
        omega[:2] = 1 / np.sqrt(2)
        tau = min(np.pi * spec.hbar / (2 * lam), spec.tau_max)
        t = np.arcsin(np.sqrt(tau / spec.tau_max))
        return np.concatenate([_reals_from_hermitian(v), omega.real, omega.imag, [t]])


@dataclass
class OptimizationResult:
    process: MeasurementProcess
    p_error: float
    report: BoundReport
    corollary2_ratio: float | None
    lower_bound: float | None
    restart_values: list[float]

    def to_dict(self) -> dict:
        return {
            "p_error": self.p_error,
            "fidelity": self.report.fidelity,
            "slack": self.report.slack,
            "tau": self.process.tau,
            "v_norm": hermitian_norm(self.process.v),
            "drive_commutator_norm": self.report.drive_commutator_norm,
            "corollary2_ratio": self.corollary2_ratio,
            "p_error_lower_bound": self.lower_bound,
            "restart_values": self.restart_values,
            "bound_report": self.report.to_dict(),
        }


def commuting_error_lower_bound(h_s, q_basis) -> float | None:
    """Helstrom-error floor for interactions commuting with ``H_S (x) 1``.

    ``F >= ||[Q, H_S]|| / ||H_S||`` then ``P_err >= (1 - sqrt(1 - F^2)) / 2``.
    """
    h_norm = hermitian_norm(h_s)
    if h_norm == 0:
        return None
    lhs = operator_norm(commutator(projector(q_basis[1]), np.asarray(h_s, dtype=complex)))
    return float(min_error_given_fidelity(lhs / h_norm))


def optimize(spec: OptimizationSpec) -> OptimizationResult:
    proto = _Protocol(spec)
    rng = np.random.default_rng(spec.seed)
    starts = []
    seeded = proto.known_feasible()
    if seeded is not None:
        starts.append(seeded)
    while len(starts) < spec.restarts:
        starts.append(rng.standard_normal(proto.size))
    best_x, best_f, values = None, np.inf, []
    for x0 in starts:
        res = minimize(
            proto.objective, x0, method="Nelder-Mead",
            options={"maxiter": spec.max_iters, "xatol": 1e-10, "fatol": 1e-15},
        )
        x = res.x if res.fun <= proto.objective(x0) else x0
        f = proto.objective(x)
        values.append(float(f))
        if f < best_f:
            best_x, best_f = x, f
    proc = proto.decode(best_x)
    report = bound_report(proc)
    ratio = report.corollary2_lhs / report.corollary2_rhs if report.corollary2_rhs > 0 else None
    lower = commuting_error_lower_bound(spec.h_s, spec.q_basis) if spec.search_space == "commuting" else None
    return OptimizationResult(proc, float(report.p_error), report, ratio, lower, values)
