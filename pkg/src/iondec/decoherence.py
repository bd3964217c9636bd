"""Per-ion and aggregate vibrational decoherence, and the combined window.

A displaced neighbor shifts an ion's transition frequency through the
1/r^p coupling; averaging the squared shift over uncorrelated zero-point
transverse motion gives the per-ion dephasing rate

    tau_i^-1 = [q2_coul * Q_sq / (2 pi hbar m w0 w_t)] * S_2p(i) / d0^2p,

and the chain dephases with tau_vib^-2 = sum_i tau_i^-2.  Radiative
decay contributes tau_rad = 2 tau_s / N, and the computational window
adds the two as rates.  The closed-form route replaces the per-ion sum
by its continuum evaluation 2 zeta(2p) sqrt(T_4p).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .chain import IonChain, solve_equilibrium
from .continuum import ContinuumModel, chain_length, min_spacing
from .errors import ValidationError
from .physmodel import (CONSTANTS, IonSpecies, TrapConfig, derive_scales,
                        qsq_convention_stamp, radiative_time)
from .sums import chain_total_asymptotic, pair_sum_exact_all, zeta

FIDELITY_WINDOW = 0.4


class DecoherenceMode(enum.Enum):
    DISCRETE_SUM = "discrete_sum"
    CONTINUUM_CLOSED_FORM = "continuum_closed_form"


def vibrational_prefactor(species: IonSpecies, trap: TrapConfig,
                          qsq_constant: float = 1.0) -> float:
    """q2_coul*Q_sq/(2 pi hbar m w0 w_t), in m^2p/s.

    Multiplying by a pair sum in SI units (S_2p/d0^2p, units m^-2p)
    yields a rate in 1/s.
    """
    scales = derive_scales(species, trap, qsq_constant)
    return (scales.q2_coul * scales.q_sq
            / (2.0 * math.pi * CONSTANTS.hbar * species.mass
               * species.omega0 * trap.omega_t))


def per_ion_rate(chain: IonChain, i: int, species: IonSpecies,
                 trap: TrapConfig, qsq_constant: float = 1.0) -> float:
    """Vibrational dephasing rate of ion i, 1/s."""
    return float(per_ion_rates(chain, species, trap, qsq_constant)[i])


def per_ion_rates(chain: IonChain, species: IonSpecies, trap: TrapConfig,
                  qsq_constant: float = 1.0) -> np.ndarray:
    """All per-ion rates at once (the pair sums share one O(N^2) pass)."""
    if chain.n_ions != trap.n_ions:
        raise ValidationError(
            "chain", f"chain has {chain.n_ions} ions but the trap is configured "
            f"for {trap.n_ions}")
    if chain.n_ions == 1:
        return np.zeros(1)
    scales = derive_scales(species, trap, qsq_constant)
    two_p = 2 * species.multipole.pair_exponent
    sums = pair_sum_exact_all(chain, two_p)
    pref = vibrational_prefactor(species, trap, qsq_constant)
    return pref * sums / scales.d0 ** two_p


def aggregate_tau_vib(per_ion: np.ndarray | list) -> float:
    """tau_vib from tau_vib^-2 = sum of squared rates; +inf if all vanish."""
    rates = np.asarray(per_ion, dtype=float)
    if rates.size == 0:
        raise ValidationError("per_ion", "need at least one rate")
    if np.any(rates < 0):
        raise ValidationError("per_ion", "rates must be >= 0")
    total_sq = float(np.sum(rates**2))
    if total_sq == 0.0:
        return math.inf
    return total_sq ** -0.5


@dataclass(frozen=True)
class FidelityCurve:
    """Exact product fidelity next to its Gaussian approximation.

    within_window marks times t <= 0.4 * min tau_i, where the product
    form stays positive and the quartic correction is small; outside
    the window both columns are still computed, just flagged.
    """

    times: np.ndarray
    product: np.ndarray
    gaussian: np.ndarray
    within_window: np.ndarray


def fidelity_curve(per_ion: np.ndarray | list, times: np.ndarray | list) -> FidelityCurve:
    """prod_i cos^2(t/tau_i) and exp(-t^2/tau_vib^2) at each time."""
    rates = np.asarray(per_ion, dtype=float)
    t = np.asarray(times, dtype=float)
    if np.any(t < 0):
        raise ValidationError("times", "must be >= 0")
    if rates.size == 0:
        raise ValidationError("per_ion", "need at least one rate")
    if np.any(rates < 0):
        raise ValidationError("per_ion", "rates must be >= 0")
    tau_vib = aggregate_tau_vib(rates)
    max_rate = float(np.max(rates))
    window = FIDELITY_WINDOW / max_rate if max_rate > 0 else math.inf
    product = np.prod(np.cos(np.outer(t, rates)) ** 2, axis=1)
    if math.isinf(tau_vib):
        gaussian = np.ones_like(t)
    else:
        gaussian = np.exp(-(t / tau_vib) ** 2)
    return FidelityCurve(times=t, product=product, gaussian=gaussian,
                         within_window=t <= window)


@dataclass(frozen=True)
class ClosedFormRate:
    """Continuum evaluation of the aggregate rate, 1/s.

    full keeps every constant (2 zeta(2p) and the chain-total integral);
    bare is the order-of-magnitude form sqrt(N) * prefactor / s0^2p that
    drops them.  Both are reported side by side on purpose: the gap
    between them is exactly the O(1)-factor bookkeeping.
    """

    full: float
    bare: float


def closed_form_rate(n_ions: int, species: IonSpecies, trap: TrapConfig,
                     model: ContinuumModel = ContinuumModel.DUBIN_FLUID,
                     qsq_constant: float = 1.0) -> ClosedFormRate:
    """Aggregate vibrational rate from the continuum chain totals."""
    if n_ions < 2:
        raise ValidationError("n_ions", "closed form needs N >= 2")
    scales = derive_scales(species, trap, qsq_constant)
    pref = vibrational_prefactor(species, trap, qsq_constant)
    two_p = 2 * species.multipole.pair_exponent
    total = chain_total_asymptotic(n_ions, 2 * two_p, model)
    full = pref * 2.0 * zeta(two_p) * math.sqrt(total) / scales.d0 ** two_p
    s0_m = min_spacing(n_ions, model) * scales.d0
    bare = math.sqrt(n_ions) * pref / s0_m ** two_p
    return ClosedFormRate(full=full, bare=bare)


@dataclass(frozen=True)
class DecoherenceReport:
    """Every timescale of the N-ion computer, in seconds."""

    mode: DecoherenceMode
    n_ions: int
    per_ion_tau: np.ndarray | None
    tau_vib: float
    tau_rad: float
    t_d: float
    notes: str


def combined_window(tau_rad: float, tau_vib: float) -> float:
    """t_d from adding the two decoherence rates."""
    return 1.0 / (1.0 / tau_rad + 1.0 / tau_vib)


def build_report(species: IonSpecies, trap: TrapConfig, mode: DecoherenceMode,
                 model: ContinuumModel = ContinuumModel.DUBIN_FLUID,
                 qsq_constant: float = 1.0,
                 chain: IonChain | None = None) -> DecoherenceReport:
    """Assemble per-ion rates (or the closed form), tau_rad, and t_d.

    A pre-solved chain may be supplied to skip the equilibrium solve in
    DISCRETE_SUM mode; it must match trap.n_ions.
    """
    n = trap.n_ions
    if mode is DecoherenceMode.DISCRETE_SUM:
        if chain is None:
            chain = solve_equilibrium(n)
        if n == 1:
            rates = np.zeros(1)
        else:
            rates = per_ion_rates(chain, species, trap, qsq_constant)
        tau_vib = aggregate_tau_vib(rates)
        with np.errstate(divide="ignore"):
            per_tau = 1.0 / rates  # inf where the rate vanishes (N = 1)
    elif mode is DecoherenceMode.CONTINUUM_CLOSED_FORM:
        tau_vib = 1.0 / closed_form_rate(n, species, trap, model, qsq_constant).full
        per_tau = None
    else:
        raise ValidationError("mode", f"unknown mode {mode!r}")
    tau_rad = radiative_time(species, n)
    t_d = combined_window(tau_rad, tau_vib)
    ratio = "inf" if math.isinf(tau_vib) else f"{tau_vib / species.tau_s:.6g}"
    notes = (f"{qsq_convention_stamp(species, qsq_constant)}; "
             f"tau_vib = {ratio} tau_s")
    return DecoherenceReport(mode=mode, n_ions=n, per_ion_tau=per_tau,
                             tau_vib=tau_vib, tau_rad=tau_rad, t_d=t_d,
                             notes=notes)
