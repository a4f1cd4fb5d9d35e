"""Experiment orchestration: strict run configuration, deterministic CSV.

A run configuration is one JSON document, validated strictly (unknown keys
are errors). Every CSV starts with a comment header carrying the artifact
version, the command, a hash of the effective configuration and the seed,
and is byte-identical for identical configuration + seed.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
import re
from concurrent.futures import ProcessPoolExecutor
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from . import __version__
from .coupling import (
    AlphaBeta,
    ComplexPhase,
    CouplingConfig,
    alpha_beta,
    final_pointer_state,
    phase_from_alpha_beta,
)
from .dicke import (
    inverse_variances,
    rotate_dicke,
    var_phi1,
    var_phi2,
    _require_integer_j,
)
from .errors import (
    ConfigError,
    NumericDomainError,
    OutOfDomainMeanError,
    SingularFisherError,
    SingularWorkingPointError,
)
from .metrology import cramer_rao_bound
from .noon import noon_expectations, noon_fisher_per_round, noon_final_state
from .qubit import forward_probabilities, pointer_input_default, reconstruct_eq5, ProbTriple
from .sampler import (
    MeasurementModel,
    ShotPlan,
    empirical_phase_estimate,
    noon_models,
    dicke_models,
    qubit_models,
    sample_observable,
)
from .states import SystemState, preset_state, state_from_pairs, tilde_psi
from .trscheme import tr_estimate_phi1, tr_parity_expectation


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class StateSpec(StrictModel):
    preset: Optional[str] = None
    amplitudes: Optional[list[tuple[float, float]]] = None

    def build(self) -> SystemState:
        if (self.preset is None) == (self.amplitudes is None):
            raise ConfigError("state needs exactly one of 'preset' or 'amplitudes'")
        if self.preset is not None:
            return preset_state(self.preset)
        return state_from_pairs(self.amplitudes)


class AxisGrid(StrictModel):
    start: float
    stop: float
    step: float

    @field_validator("step")
    @classmethod
    def _positive(cls, v):
        if v <= 0:
            raise ValueError("grid step must be positive")
        return v

    def values(self) -> np.ndarray:
        span = self.stop - self.start
        if span < -1e-12:
            raise ConfigError("grid stop must be >= start")
        count = int(round(span / self.step)) + 1
        if abs(self.start + (count - 1) * self.step - self.stop) > 1e-9:
            raise ConfigError("grid span is not an integer number of steps")
        return self.start + self.step * np.arange(count)


class PhaseGrid(StrictModel):
    phi1: AxisGrid
    phi2: AxisGrid


class ShotSpec(StrictModel):
    seed: int = 20250101
    shots_per_observable: int = 10_000
    repetitions: int = 200

    @field_validator("shots_per_observable", "repetitions")
    @classmethod
    def _positive(cls, v):
        if v < 1:
            raise ValueError("must be >= 1")
        return v


class RunConfig(StrictModel):
    scheme: Literal["qubit", "noon", "dicke", "tr"]
    state: Optional[StateSpec] = None
    theta: Optional[float] = None
    target_x: Optional[int] = None
    n: Optional[int] = None
    phases: Optional[list[tuple[float, float]]] = None
    grid: Optional[PhaseGrid] = None
    shots: Optional[ShotSpec] = None
    mode: Literal["exact", "mc"] = "exact"
    gamma_abs: Optional[list[float]] = None
    n_values: Optional[list[int]] = None
    tr_split: float = 0.5
    threads: int = 1

    def phase_points(self) -> list[tuple[float, float]]:
        if (self.phases is None) == (self.grid is None):
            raise ConfigError("need exactly one of 'phases' or 'grid'")
        if self.phases is not None:
            return [(float(a), float(b)) for a, b in self.phases]
        p1 = self.grid.phi1.values()
        p2 = self.grid.phi2.values()
        return [(float(a), float(b)) for a in p1 for b in p2]


def load_config(text: str) -> RunConfig:
    """Parse and strictly validate a JSON run configuration."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    try:
        return RunConfig.model_validate(payload)
    except ValidationError as exc:
        raise ConfigError(f"invalid run configuration: {exc}") from exc


# -- CSV plumbing --------------------------------------------------------------

_SIG_DIGITS = 15


def fmt_number(x) -> str:
    """Shortest round-trip decimal, capped at 15 significant digits."""
    v = float(x)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    s = repr(v)
    mantissa = re.sub(r"[-+.]", "", s.split("e")[0]).lstrip("0")
    if len(mantissa) > _SIG_DIGITS:
        s = format(v, f".{_SIG_DIGITS}g")
    return s


def config_hash(cfg: RunConfig) -> str:
    blob = json.dumps(cfg.model_dump(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _header(cfg: RunConfig, command: str) -> list[str]:
    seed = cfg.shots.seed if cfg.shots is not None else "none"
    return [
        f"# phasetomo v{__version__} command={command} "
        f"config_sha256={config_hash(cfg)} seed={seed}"
    ]


def _csv(lines: list[str]) -> str:
    return "\n".join(lines) + "\n"


# -- reconstruct ---------------------------------------------------------------

def _probabilities_for_x(
    state: SystemState, coupling: CouplingConfig, cfg: RunConfig, x: int
) -> ProbTriple:
    cc = CouplingConfig(coupling.theta, x, coupling.pointer_axis)
    if cfg.mode == "exact":
        return forward_probabilities(state, cc)
    ab = alpha_beta(state, cc)
    fin = final_pointer_state(ab, pointer_input_default(cc.pointer_axis), cc.pointer_axis)
    models = qubit_models(fin, cc.pointer_axis)
    plan = ShotPlan(
        seed=cfg.shots.seed,
        shots_per_observable=cfg.shots.shots_per_observable,
        observables=("K", "K1", "K2"),
    )
    recs = {
        m.label: sample_observable(m, plan, stream=3 * (x - 1) + i)
        for i, m in enumerate(models)
    }
    return ProbTriple(
        p_k=(1 + recs["K"].mean) / 2,
        p_k1=(1 + recs["K1"].mean) / 2,
        p_k2=(1 + recs["K2"].mean) / 2,
    )


def run_reconstruct(cfg: RunConfig) -> str:
    """Single-qubit tomography of every basis amplitude; exact or sampled."""
    if cfg.scheme != "qubit":
        raise ConfigError("reconstruct requires scheme = qubit")
    if cfg.state is None or cfg.theta is None:
        raise ConfigError("reconstruct needs 'state' and 'theta'")
    if cfg.mode == "mc" and cfg.shots is None:
        raise ConfigError("mc mode needs a 'shots' plan")
    state = cfg.state.build()
    coupling = CouplingConfig(cfg.theta, 1)
    pt = tilde_psi(state)
    lines = _header(cfg, "reconstruct")
    lines.append("x,re_psi_true,im_psi_true,re_psi_est,im_psi_est,abs_err")
    for x in range(1, state.dim + 1):
        probs = _probabilities_for_x(state, coupling, cfg, x)
        est = reconstruct_eq5(probs, cfg.theta, pt, state.dim)
        true = complex(state.amplitudes[x - 1])
        lines.append(
            ",".join(
                [
                    str(x),
                    fmt_number(true.real),
                    fmt_number(true.imag),
                    fmt_number(est.real),
                    fmt_number(est.imag),
                    fmt_number(abs(est - true)),
                ]
            )
        )
    return _csv(lines)


# -- scan ----------------------------------------------------------------------

def _scan_point(args) -> tuple[float, float]:
    scheme, n, p1, p2 = args
    if scheme == "dicke":
        return inverse_variances(n / 2, ComplexPhase(p1, p2))
    inv = n**2 / np.cosh(n * p2) ** 2
    return float(inv), float(inv)


def run_scan(cfg: RunConfig) -> str:
    """Grid sweep of the inverse variances for the noon or dicke scheme."""
    if cfg.scheme not in ("noon", "dicke"):
        raise ConfigError("scan requires scheme in {noon, dicke}")
    if cfg.n is None:
        raise ConfigError("scan needs 'n'")
    if cfg.scheme == "dicke":
        _require_integer_j(cfg.n / 2)
    points = cfg.phase_points()
    tasks = [(cfg.scheme, cfg.n, p1, p2) for (p1, p2) in points]
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_scan_point, tasks, chunksize=16))
    else:
        results = [_scan_point(t) for t in tasks]
    lines = _header(cfg, "scan")
    lines.append("scheme,N,phi1,phi2,inv_var_phi1,inv_var_phi2")
    for (p1, p2), (inv1, inv2) in zip(points, results):
        lines.append(
            ",".join(
                [
                    cfg.scheme,
                    str(cfg.n),
                    fmt_number(p1),
                    fmt_number(p2),
                    fmt_number(inv1),
                    fmt_number(inv2),
                ]
            )
        )
    return _csv(lines)


# -- fisher --------------------------------------------------------------------

def run_fisher(cfg: RunConfig) -> str:
    """Fisher matrix and Cramer-Rao bound of the parity round vs N.

    Working point: phi2 = log|gamma|, phi1 mid-fringe (N phi1 = pi/2).
    Singular Fisher rows are kept with nan bounds rather than dropped.
    """
    if cfg.scheme != "noon":
        raise ConfigError("fisher requires scheme = noon")
    if not cfg.gamma_abs or not cfg.n_values:
        raise ConfigError("fisher needs 'gamma_abs' and 'n_values'")
    lines = _header(cfg, "fisher")
    lines.append("N,gamma_abs,f11,f22,f12,crb11,crb22")
    fits = []
    for gabs in cfg.gamma_abs:
        if gabs <= 0:
            raise ConfigError("gamma_abs entries must be positive")
        phi2 = math.log(gabs)
        logs = []
        for n in cfg.n_values:
            if n < 1:
                raise ConfigError("n_values entries must be >= 1")
            phi = ComplexPhase(math.pi / (2 * n), phi2)
            F = noon_fisher_per_round(phi, n)
            try:
                crb = cramer_rao_bound(F).matrix
                crb11, crb22 = float(crb[0, 0]), float(crb[1, 1])
                logs.append((n, math.log(n**2 * crb11)))
            except SingularFisherError:
                crb11 = crb22 = float("nan")
            lines.append(
                ",".join(
                    [
                        str(n),
                        fmt_number(gabs),
                        fmt_number(F[0, 0]),
                        fmt_number(F[1, 1]),
                        fmt_number(F[0, 1]),
                        fmt_number(crb11),
                        fmt_number(crb22),
                    ]
                )
            )
        if len(logs) >= 2:
            ns = np.array([p[0] for p in logs], float)
            ys = np.array([p[1] for p in logs], float)
            slope = float(np.polyfit(ns, ys, 1)[0])
            fits.append(f"# fit gamma_abs={fmt_number(gabs)} "
                        f"slope_log_n2_crb11={fmt_number(slope)}")
    lines.extend(fits)
    return _csv(lines)


# -- mc ------------------------------------------------------------------------

def _phase_to_ab(p1: float, p2: float) -> AlphaBeta:
    """Any (alpha, beta) realizing the phase: cos and sin of phi/2."""
    half = complex(p1, p2) / 2
    return AlphaBeta(cmath.cos(half), cmath.sin(half))


def _mc_noon_point(cfg: RunConfig, idx: int, n: int, p1: float, p2: float):
    state = noon_final_state(_phase_to_ab(p1, p2), n)
    models = noon_models(state)
    reps = cfg.shots.repetitions
    est1, est2, flagged = [], [], 0
    for r in range(reps):
        base = (idx * reps + r) * 2
        plan = ShotPlan(cfg.shots.seed, cfg.shots.shots_per_observable,
                        ("M1", "M2"))
        recs = {
            m.label: sample_observable(m, plan, base + i)
            for i, m in enumerate(models)
        }
        try:
            est, _ = empirical_phase_estimate(recs, "noon", n)
            est1.append(est.phi1)
            est2.append(est.phi2)
        except OutOfDomainMeanError:
            flagged += 1
    an = np.cosh(n * p2) ** 2 / n**2 / cfg.shots.shots_per_observable
    return est1, est2, float(an), float(an), flagged


def _mc_dicke_point(cfg: RunConfig, idx: int, n: int, p1: float, p2: float):
    phase = ComplexPhase(p1, p2)
    j = n / 2
    state = rotate_dicke(j, phase)
    models = dicke_models(state)
    reps = cfg.shots.repetitions
    est1, est2, flagged = [], [], 0
    for r in range(reps):
        base = (idx * reps + r) * 2
        plan = ShotPlan(cfg.shots.seed, cfg.shots.shots_per_observable,
                        ("Jz", "Jy"))
        recs = {
            m.label: sample_observable(m, plan, base + i)
            for i, m in enumerate(models)
        }
        try:
            est, _ = empirical_phase_estimate(recs, "dicke", n)
            est1.append(est.phi1)
            est2.append(est.phi2)
        except (OutOfDomainMeanError, NumericDomainError):
            flagged += 1
    s = cfg.shots.shots_per_observable
    an1 = var_phi1(j, phase) / s
    an2 = var_phi2(j, p2) / s
    return est1, est2, an1, an2, flagged


def _mc_tr_point(cfg: RunConfig, idx: int, n: int, p1: float, p2: float):
    total = 2 * cfg.shots.shots_per_observable
    parity_shots = max(1, int(round(total * cfg.tr_split)))
    m2_shots = max(1, total - parity_shots)
    parity = tr_parity_expectation(p1, n)
    p_parity = np.array([(1 + parity) / 2, (1 - parity) / 2])
    m2 = noon_expectations(ComplexPhase(p1, p2), n)[1]
    p_branch = np.array([(1 + m2) / 2, (1 - m2) / 2])
    pm = MeasurementModel("parity2N", np.array([1.0, -1.0]), p_parity)
    bm = MeasurementModel("M2", np.array([1.0, -1.0]), p_branch)
    reps = cfg.shots.repetitions
    est1, est2, flagged = [], [], 0
    for r in range(reps):
        base = (idx * reps + r) * 2
        plan_a = ShotPlan(cfg.shots.seed, parity_shots, ("parity2N",))
        plan_b = ShotPlan(cfg.shots.seed, m2_shots, ("M2",))
        rec_a = sample_observable(pm, plan_a, base)
        rec_b = sample_observable(bm, plan_b, base + 1)
        try:
            phi1_hat, _ = tr_estimate_phi1(rec_a.mean, n)
            if abs(rec_b.mean) >= 1:
                raise OutOfDomainMeanError("branch mean at saturation")
            phi2_hat = float(np.arctanh(rec_b.mean) / n)
            est1.append(phi1_hat)
            est2.append(phi2_hat)
        except (OutOfDomainMeanError, SingularWorkingPointError):
            flagged += 1
    an1 = 1.0 / (4 * n * n) / parity_shots
    an2 = float(np.cosh(n * p2) ** 2 / n**2 / m2_shots)
    return est1, est2, an1, an2, flagged


def _mc_qubit_rows(cfg: RunConfig, lines: list[str], comments: list[str]) -> None:
    state = cfg.state.build()
    reps = cfg.shots.repetitions
    s = cfg.shots.shots_per_observable
    xs = (
        [cfg.target_x]
        if cfg.target_x is not None
        else list(range(1, state.dim + 1))
    )
    for idx, x in enumerate(xs):
        cc = CouplingConfig(cfg.theta, x)
        ab = alpha_beta(state, cc)
        phase = phase_from_alpha_beta(ab)
        fin = final_pointer_state(ab, pointer_input_default(cc.pointer_axis),
                                  cc.pointer_axis)
        models = qubit_models(fin, cc.pointer_axis)
        est1, est2, flagged = [], [], 0
        for r in range(reps):
            base = (idx * reps + r) * 3
            plan = ShotPlan(cfg.shots.seed, s, ("K", "K1", "K2"))
            recs = {
                m.label: sample_observable(m, plan, base + i)
                for i, m in enumerate(models)
            }
            try:
                est, _ = empirical_phase_estimate(recs, "qubit", 1)
                est1.append(est.phi1)
                est2.append(est.phi2)
            except OutOfDomainMeanError:
                flagged += 1
        an = float(np.cosh(phase.phi2) ** 2 / s)
        _append_mc_row(lines, comments, cfg, "qubit", 1, phase.phi1, phase.phi2,
                       s, est1, est2, an, an, flagged)


def _append_mc_row(lines, comments, cfg, scheme, n, p1, p2, shots,
                   est1, est2, an1, an2, flagged) -> None:
    emp1 = float(np.var(est1, ddof=1)) if len(est1) > 1 else float("nan")
    emp2 = float(np.var(est2, ddof=1)) if len(est2) > 1 else float("nan")
    ratio1 = emp1 / an1 if an1 and not math.isnan(emp1) else float("nan")
    ratio2 = emp2 / an2 if an2 and not math.isnan(emp2) else float("nan")
    lines.append(
        ",".join(
            [
                scheme,
                str(n),
                fmt_number(p1),
                fmt_number(p2),
                str(shots),
                fmt_number(emp1),
                fmt_number(emp2),
                fmt_number(an1),
                fmt_number(an2),
                fmt_number(ratio1),
                fmt_number(ratio2),
            ]
        )
    )
    if flagged:
        comments.append(
            f"# flagged scheme={scheme} phi1={fmt_number(p1)} "
            f"phi2={fmt_number(p2)} out_of_domain_reps={flagged}"
        )


def _mc_point_task(args):
    scheme, cfg, idx, n, p1, p2 = args
    fn = {"noon": _mc_noon_point, "dicke": _mc_dicke_point,
          "tr": _mc_tr_point}[scheme]
    return fn(cfg, idx, n, p1, p2)


def run_mc(cfg: RunConfig) -> str:
    """Monte Carlo estimator validation: empirical vs analytic variances.

    Counter-based streams are indexed by (point, repetition, observable),
    so distributing points over workers cannot change any outcome.
    """
    if cfg.shots is None:
        raise ConfigError("mc needs a 'shots' plan")
    lines = _header(cfg, "mc")
    lines.append(
        "scheme,N,phi1,phi2,shots,emp_var_phi1,emp_var_phi2,"
        "analytic_var_phi1,analytic_var_phi2,ratio1,ratio2"
    )
    comments: list[str] = []
    if cfg.scheme == "qubit":
        if cfg.state is None or cfg.theta is None:
            raise ConfigError("qubit mc needs 'state' and 'theta'")
        _mc_qubit_rows(cfg, lines, comments)
        lines.extend(comments)
        return _csv(lines)
    if cfg.n is None:
        raise ConfigError("mc needs 'n' for this scheme")
    points = cfg.phase_points()
    tasks = [
        (cfg.scheme, cfg, idx, cfg.n, p1, p2)
        for idx, (p1, p2) in enumerate(points)
    ]
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_mc_point_task, tasks))
    else:
        results = [_mc_point_task(t) for t in tasks]
    for (p1, p2), (est1, est2, an1, an2, flagged) in zip(points, results):
        _append_mc_row(lines, comments, cfg, cfg.scheme, cfg.n, p1, p2,
                       cfg.shots.shots_per_observable, est1, est2, an1, an2,
                       flagged)
    lines.extend(comments)
    return _csv(lines)


COMMANDS = {
    "reconstruct": run_reconstruct,
    "scan": run_scan,
    "fisher": run_fisher,
    "mc": run_mc,
}


def run_command(command: str, cfg: RunConfig) -> str:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    return COMMANDS[command](cfg)
