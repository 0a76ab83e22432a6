"""Scalar structure ODEs along the distinguished axis direction.

On a hypersurface with pointwise SO(2) or Z3 symmetry the structure scalars
depend only on the warped-product coordinate t (the flow parameter of the
unit axis field e1) and satisfy

    a'    = (mu1 - eta) (a - lambda)
    eta'  = -eta^2 - 3 mu1^2 - (a + lambda) / 2
    mu1'  = -4 mu1 eta - (lambda - a) / 2
    mu2'  = -mu2 eta
    beta' = beta (eta + mu1)
    f'    = eta

with lambda(t) supplied by the user (the equations do not determine it).
Two combinations are conserved along solutions and double as integrator
diagnostics:

    I_nu   = e^(2f) (a + eta^2 - mu1^2)           (= e^(2f) nu)
    I_curv = e^(2f) (a - mu1^2 + 2 mu2^2 + eta^2) (curvature of the fibre)

The integrator is fixed-step classical RK4 for reproducibility; the
right-hand sides are Riccati-like and genuinely blow up in finite time, so a
magnitude guard converts escapes into a reported BlowUp.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import BlowUp, GeometryError
from .jets import ImmersionSpec
from .symmetry import classify_point

BLOWUP_LIMIT = 1e12

StateVector = np.ndarray  # (a, eta, mu1, mu2, beta, f)
STATE_FIELDS = ("a", "eta", "mu1", "mu2", "beta", "f")


@dataclass
class StructureState:
    t: float
    a: float
    eta: float
    mu1: float
    mu2: float
    beta: float = 1.0
    f: float = 0.0
    lambda_fn: Callable[[float], float] | None = None

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must stay positive")

    def vector(self) -> StateVector:
        return np.array([self.a, self.eta, self.mu1, self.mu2, self.beta, self.f])


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # (len(t), 6) columns in STATE_FIELDS order
    method: str
    step: float

    def column(self, name: str) -> np.ndarray:
        return self.states[:, STATE_FIELDS.index(name)]

    def e2f_nu(self) -> np.ndarray:
        a, eta, mu1 = (self.column(k) for k in ("a", "eta", "mu1"))
        return np.exp(2 * self.column("f")) * (a + eta ** 2 - mu1 ** 2)

    def curv_fibre(self) -> np.ndarray:
        a, eta, mu1, mu2 = (self.column(k) for k in ("a", "eta", "mu1", "mu2"))
        return np.exp(2 * self.column("f")) * (a - mu1 ** 2 + 2 * mu2 ** 2 + eta ** 2)

    def rows(self) -> list[dict]:
        e2f_nu = self.e2f_nu()
        curv = self.curv_fibre()
        out = []
        for i, t in enumerate(self.t):
            row = {"t": float(t)}
            row.update({k: float(self.states[i, j]) for j, k in enumerate(STATE_FIELDS)})
            row["e2f_nu"] = float(e2f_nu[i])
            row["curvN2"] = float(curv[i])
            out.append(row)
        return out


def _rhs(t: float, y: StateVector, lam: Callable[[float], float]) -> StateVector:
    a, eta, mu1, mu2, beta, _ = y
    lv = lam(t)
    return np.array([
        (mu1 - eta) * (a - lv),
        -eta ** 2 - 3 * mu1 ** 2 - 0.5 * (a + lv),
        -4 * mu1 * eta - 0.5 * (lv - a),
        -mu2 * eta,
        beta * (eta + mu1),
        eta,
    ])


def flow_integrate(
    init: StructureState,
    t_span: tuple[float, float],
    step: float,
) -> Trajectory:
    """Classical fixed-step RK4 over t_span (t_span[0] must equal init.t).

    The actual step is t-span / round(span / step) so the endpoint is hit
    exactly; the metadata records it.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    t0, t1 = float(t_span[0]), float(t_span[1])
    if abs(t0 - init.t) > 1e-12:
        raise ValueError("t_span must start at the initial state's t")
    if t1 <= t0:
        raise ValueError("t_span must be increasing")
    lam = init.lambda_fn or (lambda t: 0.0)
    n_steps = max(1, round((t1 - t0) / step))
    hstep = (t1 - t0) / n_steps
    ts = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, 6))
    y = init.vector()
    ts[0] = t0
    states[0] = y
    t = t0
    for i in range(1, n_steps + 1):
        k1 = _rhs(t, y, lam)
        k2 = _rhs(t + hstep / 2, y + hstep / 2 * k1, lam)
        k3 = _rhs(t + hstep / 2, y + hstep / 2 * k2, lam)
        k4 = _rhs(t + hstep, y + hstep * k3, lam)
        y = y + hstep / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + i * hstep
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > BLOWUP_LIMIT:
            raise BlowUp(f"structure flow escaped the guard at t = {t:.6g}", t=t)
        ts[i] = t
        states[i] = y
    return Trajectory(t=ts, states=states, method="rk4", step=hstep)


@dataclass(frozen=True)
class FirstIntegralDrift:
    drift_nu: float
    drift_curv: float


def first_integral_check(traj: Trajectory) -> FirstIntegralDrift:
    """Max drift of both conserved quantities, relative to the initial value
    when it is nonzero (absolute otherwise)."""

    def drift(series: np.ndarray) -> float:
        ref = series[0]
        dev = float(np.max(np.abs(series - ref)))
        denom = abs(ref)
        if denom <= 1e-12 * max(1.0, float(np.max(np.abs(series)))):
            return dev
        return dev / denom

    return FirstIntegralDrift(
        drift_nu=drift(traj.e2f_nu()),
        drift_curv=drift(traj.curv_fibre()),
    )


# ---------------------------------------------------------------------------
# surface <-> flow consistency


@dataclass
class SymmetryLine:
    """Integral curve of the unit axis field e1, in chart coordinates."""

    t: np.ndarray          # flow parameter, starting at 0
    points: np.ndarray     # (len(t), 3) chart coordinates


def trace_symmetry_line(
    spec: ImmersionSpec,
    x0: Sequence[float],
    length: float,
    step: float = 5e-3,
) -> SymmetryLine:
    """Integrate dx/dt = e1(x) (chart components of the canonical axis).

    The mu1 > 0 convention orients e1 consistently, so the line is the
    warped-product t-coordinate curve through x0.
    """

    def e1_field(x):
        rep = classify_point(spec, x, compute_eta=False)
        if rep.frame is None:
            raise GeometryError(
                f"axis field unavailable at {tuple(x)}: {rep.reason}"
            )
        return rep.frame.e1

    n_steps = max(1, round(length / step))
    h = length / n_steps
    ts = np.empty(n_steps + 1)
    pts = np.empty((n_steps + 1, 3))
    x = np.asarray(x0, dtype=float)
    ts[0] = 0.0
    pts[0] = x
    for i in range(1, n_steps + 1):
        k1 = e1_field(x)
        k2 = e1_field(x + h / 2 * k1)
        k3 = e1_field(x + h / 2 * k2)
        k4 = e1_field(x + h * k3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ts[i] = i * h
        pts[i] = x
    return SymmetryLine(t=ts, points=pts)


@dataclass
class MatchReport:
    max_deviation: float
    deviations: dict
    line: SymmetryLine
    trajectory: Trajectory
    sample_t: np.ndarray

    def as_dict(self) -> dict:
        return {
            "max_deviation": self.max_deviation,
            "deviations": dict(self.deviations),
            "n_samples": int(len(self.sample_t)),
        }


def match_surface(
    spec: ImmersionSpec,
    x0: Sequence[float],
    length: float,
    line_step: float = 5e-3,
    flow_step: float = 1e-3,
    n_samples: int = 13,
) -> MatchReport:
    """Compare classifier scalars along a symmetry line with the scalar flow.

    (a, eta, mu1, mu2) are extracted at samples of the line; the flow is
    integrated from the matched initial state with lambda(t) read off the
    surface (cubic spline through dense lambda samples).  Returns the max
    componentwise deviation.
    """
    line = trace_symmetry_line(spec, x0, length, step=line_step)

    # dense lambda(t) along the line (pointwise, no patch needed)
    stride = max(1, len(line.t) // 40)
    lam_ts, lam_vals = [], []
    for i in range(0, len(line.t), stride):
        rep = classify_point(spec, line.points[i], compute_eta=False)
        if rep.lam is None:
            raise GeometryError(f"classifier failed on the line: {rep.reason}")
        lam_ts.append(line.t[i])
        lam_vals.append(rep.lam)
    if lam_ts[-1] < line.t[-1]:
        rep = classify_point(spec, line.points[-1], compute_eta=False)
        lam_ts.append(line.t[-1])
        lam_vals.append(rep.lam)
    lam_spline = CubicSpline(np.asarray(lam_ts), np.asarray(lam_vals))

    # comparison samples with patch-based eta
    idx = np.unique(np.linspace(0, len(line.t) - 1, n_samples).astype(int))
    sample_t = line.t[idx]
    measured = np.empty((len(idx), 4))
    for row, i in enumerate(idx):
        rep = classify_point(spec, line.points[i], compute_eta=True)
        if rep.eta is None:
            raise GeometryError(f"eta extraction failed on the line: {rep.reason}")
        measured[row] = (rep.a, rep.eta, rep.mu1, rep.mu2)

    init = StructureState(
        t=0.0,
        a=measured[0, 0],
        eta=measured[0, 1],
        mu1=measured[0, 2],
        mu2=measured[0, 3],
        beta=1.0,
        f=0.0,
        lambda_fn=lambda t: float(lam_spline(t)),
    )
    traj = flow_integrate(init, (0.0, float(line.t[-1])), flow_step)

    devs = {}
    names = ("a", "eta", "mu1", "mu2")
    flow_idx = np.searchsorted(traj.t, sample_t)
    flow_idx = np.clip(flow_idx, 0, len(traj.t) - 1)
    for c, name in enumerate(names):
        flow_vals = traj.column(name)[flow_idx]
        devs[name] = float(np.max(np.abs(flow_vals - measured[:, c])))
    return MatchReport(
        max_deviation=max(devs.values()),
        deviations=devs,
        line=line,
        trajectory=traj,
        sample_t=sample_t,
    )
