"""Physical constants, ion species and trap parameters, and derived scales.

Everything downstream works in SI internally.  The literature's
Gaussian-units charge squared is represented as ``q2_coul = q^2/(4 pi
eps0)`` (joule meters), which keeps the micrometre-scale cross-checks
free of unit ambiguity.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values, the single source of truth for the package."""

    hbar: float = 1.054571817e-34        # J s
    c_light: float = 299792458.0         # m / s (defined)
    epsilon0: float = 8.8541878128e-12   # F / m
    atomic_mass: float = 1.66053906660e-27  # kg
    elementary_charge: float = 1.602176634e-19  # C (defined)


CONSTANTS = PhysicalConstants()


class Multipole(enum.Enum):
    """Transition type; sets the exponent p of the 1/r^p perturbing coupling."""

    E1 = "E1"
    E2 = "E2"

    @property
    def pair_exponent(self) -> int:
        return 3 if self is Multipole.E1 else 4


def _require_positive(field: str, value: float) -> None:
    if not value > 0 or not math.isfinite(value):
        raise ValidationError(field, f"must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class IonSpecies:
    """One ion type: charge, mass, and optical-transition data.

    Parameters
    ----------
    name : str
        Label only; not interpreted.
    mass : float
        Ion mass in kilograms.
    charge : float
        Ion charge in coulombs.
    omega0 : float
        Optical transition angular frequency, rad/s.
    tau_s : float
        Spontaneous lifetime of the upper level, seconds.
    multipole : Multipole
        E1 or E2; selects the coupling exponent p = 3 or 4.
    """

    name: str
    mass: float
    charge: float
    omega0: float
    tau_s: float
    multipole: Multipole

    def __post_init__(self):
        _require_positive("mass", self.mass)
        _require_positive("charge", self.charge)
        _require_positive("omega0", self.omega0)
        _require_positive("tau_s", self.tau_s)
        if not isinstance(self.multipole, Multipole):
            raise ValidationError("multipole", f"expected Multipole, got {self.multipole!r}")

    @classmethod
    def from_lab_units(cls, name: str, mass_amu: float, charge_e: float,
                       f0_hz: float, tau_s_s: float,
                       multipole: Multipole) -> "IonSpecies":
        """Build from laboratory units: amu, elementary charges, and hertz.

        Frequencies are quoted as ordinary frequencies (omega/2pi), matching
        the usual \"omega_z/2pi = 100 kHz\" style of lab reporting.
        """
        _require_positive("mass_amu", mass_amu)
        _require_positive("charge_e", charge_e)
        _require_positive("f0_hz", f0_hz)
        _require_positive("tau_s_s", tau_s_s)
        return cls(
            name=name,
            mass=mass_amu * CONSTANTS.atomic_mass,
            charge=charge_e * CONSTANTS.elementary_charge,
            omega0=2.0 * math.pi * f0_hz,
            tau_s=tau_s_s,
            multipole=multipole,
        )


@dataclass(frozen=True)
class TrapConfig:
    """Axial/transverse secular frequencies (rad/s) and the ion count."""

    omega_z: float
    omega_t: float
    n_ions: int

    def __post_init__(self):
        _require_positive("omega_z", self.omega_z)
        _require_positive("omega_t", self.omega_t)
        if not self.omega_t > self.omega_z:
            raise ValidationError(
                "omega_t",
                f"linear-chain regime requires omega_t > omega_z "
                f"(got {self.omega_t} <= {self.omega_z})")
        if not isinstance(self.n_ions, int) or self.n_ions < 1:
            raise ValidationError("n_ions", f"must be an integer >= 1, got {self.n_ions!r}")

    @classmethod
    def from_lab_units(cls, fz_hz: float, ft_hz: float, n_ions: int) -> "TrapConfig":
        _require_positive("fz_hz", fz_hz)
        _require_positive("ft_hz", ft_hz)
        return cls(omega_z=2.0 * math.pi * fz_hz,
                   omega_t=2.0 * math.pi * ft_hz,
                   n_ions=n_ions)


@dataclass(frozen=True)
class DerivedScales:
    """Length/wavenumber scales derived from a species and a trap.

    d0 : trap length scale, meters; d0^3 * m * omega_z^2 = q2_coul exactly.
    k0 : transition wavenumber omega0/c, 1/m.
    q2_coul : charge^2/(4 pi eps0), joule meters.
    q_sq : squared multipole matrix element under the lifetime convention,
           joule meters^5 for E2 (quadrupole) or joule meters^3 for E1.
    """

    d0: float
    k0: float
    q2_coul: float
    q_sq: float


def derive_scales(species: IonSpecies, trap: TrapConfig,
                  qsq_constant: float = 1.0) -> DerivedScales:
    """Compute DerivedScales for a species in a trap.

    The squared multipole moment is tied to the spontaneous lifetime by
    Q^2 = qsq_constant * hbar / (tau_s * k0^(2p-3)), i.e. hbar/(tau_s k0^5)
    for a quadrupole (p = 4) and hbar/(tau_s k0^3) for a dipole (p = 3).
    The proportionality constant is an order-of-magnitude convention and
    is surfaced as ``qsq_constant`` (default 1).
    """
    _require_positive("qsq_constant", qsq_constant)
    q2_coul = species.charge**2 / (4.0 * math.pi * CONSTANTS.epsilon0)
    d0 = (q2_coul / (species.mass * trap.omega_z**2)) ** (1.0 / 3.0)
    k0 = species.omega0 / CONSTANTS.c_light
    p = species.multipole.pair_exponent
    q_sq = qsq_constant * CONSTANTS.hbar / (species.tau_s * k0 ** (2 * p - 3))
    return DerivedScales(d0=d0, k0=k0, q2_coul=q2_coul, q_sq=q_sq)


def radiative_time(species: IonSpecies, n_ions: int) -> float:
    """Radiative decoherence window of an N-ion register: 2 tau_s / N."""
    if not isinstance(n_ions, int) or n_ions < 1:
        raise ValidationError("n_ions", f"must be an integer >= 1, got {n_ions!r}")
    return 2.0 * species.tau_s / n_ions


def qsq_convention_stamp(species: IonSpecies, qsq_constant: float = 1.0) -> str:
    """Human-readable record of the Q^2 convention in force."""
    p = species.multipole.pair_exponent
    symbol = "Q^2" if species.multipole is Multipole.E2 else "D^2"
    return (f"{symbol} = {qsq_constant:g} * hbar/(tau_s * k0^{2 * p - 3}) "
            f"({species.multipole.value} lifetime convention)")
