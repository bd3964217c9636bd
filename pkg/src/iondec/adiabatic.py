"""Driven two-level dynamics and the adiabatic-phase prediction.

The state is written u_+(t) e^{-i w0 t/2}|+> + u_-(t) e^{+i w0 t/2}|->,
so the equations of motion couple the slowly varying amplitudes only
through the transverse drive:

    i du+/dt = e^{+i w0 t} f_-(t) u_-,      f_± = f_x ± i f_y,
    i du-/dt = e^{-i w0 t} f_+(t) u_+.

Everything integrates in the dimensionless phase theta = w0 t with a
fixed-step classical RK4.  One RK4 step of a linear system is itself a
linear map, so the stepper materializes the 2x2 one-step operators in
batches and combines them pairwise (matrix products associate); that
keeps 10^7-step windows at numpy speed without changing the method or
its numbers.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyError, ValidationError

DEFAULT_DTHETA = 0.05
MAX_DTHETA = 0.1
DEFAULT_NORM_BUDGET = 1e-6
_MAX_STORED = 4000
# Empirical norm-drift model for this stepper: drift ~ C * theta * (eps/w0)^2
# * dtheta^4.  Measured C is ~9e-5; the value below carries a ~10x margin.
_DRIFT_COEFF = 1e-3

_REGIME_LIMIT = 0.1


@dataclass(frozen=True)
class DriveField:
    """Transverse drive f(t) = (f_x, f_y, 0) in angular-frequency units.

    The z component is identically zero by construction.  Three forms are
    supported: a constant-magnitude circular sweep, a constant vector, and
    a sampled table with linear interpolation (constant beyond the ends).
    """

    kind: str
    amplitude: float = 0.0
    rotation: float = 0.0
    fx: float = 0.0
    fy: float = 0.0
    times: np.ndarray | None = field(default=None, repr=False)
    fx_samples: np.ndarray | None = field(default=None, repr=False)
    fy_samples: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def circular(cls, amplitude, rotation):
        """f(t) = amplitude * (cos(rotation*t), sin(rotation*t))."""
        if amplitude < 0:
            raise ValidationError("amplitude", f"must be >= 0, got {amplitude!r}")
        return cls(kind="circular", amplitude=float(amplitude), rotation=float(rotation))

    @classmethod
    def constant(cls, fx, fy):
        return cls(kind="constant", fx=float(fx), fy=float(fy))

    @classmethod
    def sampled(cls, times, fx, fy):
        t = np.asarray(times, dtype=float)
        x = np.asarray(fx, dtype=float)
        y = np.asarray(fy, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValidationError("times", "need at least two samples")
        if x.shape != t.shape or y.shape != t.shape:
            raise ValidationError("fx", "sample arrays must match the time grid")
        if np.any(np.diff(t) <= 0):
            raise ValidationError("times", "must be strictly increasing")
        return cls(kind="sampled", times=t, fx_samples=x, fy_samples=y)

    def components(self, t):
        """(f_x, f_y) at time t (scalar or array), angular-frequency units."""
        t = np.asarray(t, dtype=float)
        if self.kind == "circular":
            return (self.amplitude * np.cos(self.rotation * t),
                    self.amplitude * np.sin(self.rotation * t))
        if self.kind == "constant":
            return (np.full_like(t, self.fx), np.full_like(t, self.fy))
        return (np.interp(t, self.times, self.fx_samples),
                np.interp(t, self.times, self.fy_samples))

    def magnitude(self, t):
        fx, fy = self.components(t)
        return np.hypot(fx, fy)

    def regime_ratios(self, omega0):
        """(max|f|/w0, rotation-rate/w0); the adiabatic analysis wants both << 1."""
        if self.kind == "circular":
            return self.amplitude / omega0, abs(self.rotation) / omega0
        if self.kind == "constant":
            return math.hypot(self.fx, self.fy) / omega0, 0.0
        eps = float(np.max(self.magnitude(self.times))) / omega0
        angle = np.unwrap(np.arctan2(self.fy_samples, self.fx_samples))
        rates = np.abs(np.diff(angle) / np.diff(self.times))
        return eps, float(np.max(rates)) / omega0


def _warn_regime(drive, omega0):
    eps_ratio, rot_ratio = drive.regime_ratios(omega0)
    if eps_ratio >= _REGIME_LIMIT:
        warnings.warn(f"drive amplitude is {eps_ratio:.3g} of the precession "
                      "frequency; the adiabatic treatment assumes it is small",
                      stacklevel=3)
    if rot_ratio >= _REGIME_LIMIT:
        warnings.warn(f"drive rotation rate is {rot_ratio:.3g} of the precession "
                      "frequency; the adiabatic treatment assumes it is small",
                      stacklevel=3)
    return eps_ratio, rot_ratio


@dataclass(frozen=True)
class SpinTrajectory:
    """Amplitudes u±(theta) on a decimated grid of theta = w0*t."""

    omega0: float
    theta: np.ndarray
    u_plus: np.ndarray
    u_minus: np.ndarray
    norm_drift: float

    @property
    def times(self):
        """Stored instants in seconds."""
        return self.theta / self.omega0

    def norms(self):
        return np.abs(self.u_plus) ** 2 + np.abs(self.u_minus) ** 2


def suggested_step(omega0, drive, t_end, norm_budget=1e-9):
    """A fixed step (seconds) keeping predicted norm drift under budget.

    Uses the empirical drift model above; capped at the default step.
    """
    theta_end = omega0 * t_end
    eps_ratio = drive.regime_ratios(omega0)[0]
    if theta_end <= 0 or eps_ratio <= 0:
        return DEFAULT_DTHETA / omega0
    dtheta = (norm_budget / (_DRIFT_COEFF * theta_end * eps_ratio**2)) ** 0.25
    return min(DEFAULT_DTHETA, dtheta) / omega0


def integrate_tls(omega0, drive, initial, t_end, dt=None, *,
                  max_norm_drift=DEFAULT_NORM_BUDGET, store_every=None):
    """Integrate the two-level amplitudes from 0 to t_end.

    Parameters
    ----------
    omega0 : float
        Precession (fast) angular frequency, rad/s.
    drive : DriveField
    initial : pair of complex
        (u_plus, u_minus) at t = 0; must be normalized.
    t_end : float
        Integration window in seconds.
    dt : float, optional
        Fixed step in seconds; default 0.05/omega0, and at most 0.1/omega0
        so the fast phase stays resolved.  The step is shrunk slightly so
        an integer number of steps lands exactly on t_end.
    max_norm_drift : float
        Abort threshold on | |u+|^2 + |u-|^2 - 1 | at stored times.
    store_every : int, optional
        Keep every k-th step; default decimates to at most ~4000 points.
    """
    if omega0 <= 0:
        raise ValidationError("omega0", f"must be positive, got {omega0!r}")
    if t_end < 0:
        raise ValidationError("t_end", f"must be >= 0, got {t_end!r}")
    u0 = np.asarray(initial, dtype=complex)
    if u0.shape != (2,):
        raise ValidationError("initial", "expected a (u_plus, u_minus) pair")
    norm0 = float(np.abs(u0[0])**2 + np.abs(u0[1])**2)
    if abs(norm0 - 1.0) > 1e-9:
        raise ValidationError("initial", f"state must be normalized, |u|^2 = {norm0!r}")
    if dt is None:
        dt = DEFAULT_DTHETA / omega0
    if dt * omega0 > MAX_DTHETA * (1 + 1e-12):
        raise ValidationError(
            "dt", f"step {dt * omega0:.4g}/omega0 does not resolve the fast phase "
            f"(need <= {MAX_DTHETA}/omega0)")
    _warn_regime(drive, omega0)

    theta_end = omega0 * t_end
    n_steps = max(1, math.ceil(theta_end / (omega0 * dt) - 1e-9)) if theta_end > 0 else 0
    if n_steps == 0:
        theta = np.zeros(1)
        return SpinTrajectory(omega0=omega0, theta=theta,
                              u_plus=u0[:1] * np.ones(1), u_minus=u0[1:] * np.ones(1),
                              norm_drift=0.0)
    dtheta = theta_end / n_steps
    if store_every is None:
        store_every = max(1, -(-n_steps // _MAX_STORED))
    store_every = int(store_every)

    n_stored = n_steps // store_every + 1 + (1 if n_steps % store_every else 0)
    theta = np.empty(n_stored)
    up = np.empty(n_stored, dtype=complex)
    um = np.empty(n_stored, dtype=complex)
    theta[0], up[0], um[0] = 0.0, u0[0], u0[1]

    u = u0.copy()
    pos = 0
    out = 1
    while pos < n_steps:
        m = min(store_every, n_steps - pos)
        op = _chunk_operator(drive, omega0, pos * dtheta, dtheta, m)
        u = op @ u
        pos += m
        theta[out] = pos * dtheta
        up[out], um[out] = u[0], u[1]
        out += 1

    norms = np.abs(up)**2 + np.abs(um)**2
    drift = float(np.max(np.abs(norms - norm0)))
    if drift > max_norm_drift:
        raise AccuracyError(
            f"norm drifted by {drift:.3e} (budget {max_norm_drift:.1e}); "
            "reduce the step")
    return SpinTrajectory(omega0=omega0, theta=theta, u_plus=up, u_minus=um,
                          norm_drift=drift)


def _coupling(drive, omega0, theta):
    """g(theta) = e^{i theta} f_-(theta/w0)/w0, for an array of theta."""
    fx, fy = drive.components(theta / omega0)
    return np.exp(1j * theta) * (fx - 1j * fy) / omega0


def _chunk_operator(drive, omega0, theta0, dtheta, m):
    """Product of m consecutive RK4 one-step operators starting at theta0.

    Each step is u_{k+1} = A_k u_k with A_k assembled from the coupling at
    theta_k, theta_k + dtheta/2 and theta_k + dtheta; the A_k combine by
    pairwise matrix products.
    """
    k = np.arange(m)
    g1 = _coupling(drive, omega0, theta0 + k * dtheta)
    g2 = _coupling(drive, omega0, theta0 + (k + 0.5) * dtheta)
    g3 = _coupling(drive, omega0, theta0 + (k + 1.0) * dtheta)

    zeros = np.zeros_like(g1)
    def mat(g):
        return np.stack([np.stack([zeros, -1j * g], axis=-1),
                         np.stack([-1j * np.conj(g), zeros], axis=-1)], axis=-2)

    m1, m2, m3 = mat(g1), mat(g2), mat(g3)
    eye = np.eye(2, dtype=complex)
    k1 = m1
    k2 = m2 @ (eye + 0.5 * dtheta * k1)
    k3 = m2 @ (eye + 0.5 * dtheta * k2)
    k4 = m3 @ (eye + dtheta * k3)
    ops = eye + (dtheta / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    while ops.shape[0] > 1:
        half = ops[1::2] @ ops[0:ops.shape[0] - 1:2]
        if ops.shape[0] % 2:
            half = np.concatenate([half, ops[-1:]], axis=0)
        ops = half
    return ops[0]


def adiabatic_phase(drive, omega0, t):
    """Accumulated phase Phi(t) = int_0^t |f|^2/omega0 dt'.

    Closed form eps^2 t/omega0 when |f| is constant (circular or constant
    drives); otherwise segment-wise Simpson quadrature, which is exact for
    the piecewise-linear sampled form.
    """
    if t < 0:
        raise ValidationError("t", f"must be >= 0, got {t!r}")
    if drive.kind == "circular":
        return drive.amplitude**2 * t / omega0
    if drive.kind == "constant":
        return (drive.fx**2 + drive.fy**2) * t / omega0
    knots = drive.times[(drive.times > 0) & (drive.times < t)]
    edges = np.concatenate([[0.0], knots, [t]])
    mids = 0.5 * (edges[:-1] + edges[1:])
    f2_edges = drive.magnitude(edges) ** 2
    f2_mids = drive.magnitude(mids) ** 2
    seg = (edges[1:] - edges[:-1]) / 6.0 * (
        f2_edges[:-1] + 4.0 * f2_mids + f2_edges[1:])
    return float(np.sum(seg)) / omega0


def overlap_fidelity(trajectory, omega0=None):
    """Re<psi_0(t)|psi(t)> along the trajectory, psi_0 the undriven state.

    The fast phases cancel in the inner product, leaving Re[(u+ + u-)/sqrt(2)]
    for the equal-superposition start; omega0 is accepted for symmetry with
    the other operations but is not needed.  Rejects trajectories that did
    not start in the equal superposition, where this reduction fails.
    """
    start = np.array([trajectory.u_plus[0], trajectory.u_minus[0]])
    if np.max(np.abs(start - 1.0 / np.sqrt(2.0))) > 1e-9:
        raise ValidationError(
            "trajectory", "overlap formula assumes u+(0) = u-(0) = 1/sqrt(2)")
    return np.real((trajectory.u_plus + trajectory.u_minus) / np.sqrt(2.0))


def instantaneous_frequency(omega0, V, hbar=None):
    """(exact, second-order) precession frequency with transverse energy V.

    exact = sqrt(omega0^2 + (V/hbar)^2); the second-order form adds
    V^2/(2 hbar^2 omega0).  Pass hbar=1 for V already in angular-frequency
    units; default is SI.
    """
    if hbar is None:
        from .physmodel import CONSTANTS
        hbar = CONSTANTS.hbar
    ratio = V / hbar
    exact = math.sqrt(omega0**2 + ratio**2)
    second = omega0 + ratio**2 / (2.0 * omega0)
    return exact, second
