# scripts/experiment_planner.py
"""
experiment_planner.py
---------------------
Counting statistics of a gamma-emitting sample -> smallest resolvable
relative response delta -> bound on the nonlocality scale l_n.

    N_gamma  = N (1 - e^{-k tau})      k = 1/(T_half ln 2)   (convention "paper")
                                       k = ln 2 / T_half     (convention "standard")
    detected = efficiency * N_gamma
    delta    = 1/detected              (criterion "paper-inverse")
             = 1/sqrt(detected)        (criterion "shot-noise")
    l_n      = c sqrt(delta) / |Omega|

The species catalog is config/nuclear_species.yaml (versioned); Na-20 is
built in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from errors import ConfigError, PlannerError
from units import (C_LIGHT, ELECTRON_MASS_MEV, mev_to_rad_per_s,
                   rad_per_s_to_mev)
from util import REPO_ROOT, fmt_sig, log_info, read_yaml

AVOGADRO = 6.022_140_76e23
DEFAULT_CATALOG = REPO_ROOT / "config" / "nuclear_species.yaml"
CATALOG_VERSION = 1


class DecayConvention(str, Enum):
    PAPER = "paper"          # exponent (tau/T_half) / ln 2
    STANDARD = "standard"    # exponent tau ln 2 / T_half


class StatisticsCriterion(str, Enum):
    PAPER_INVERSE = "paper-inverse"   # N >> 1/delta
    SHOT_NOISE = "shot-noise"         # N >> 1/delta^2


@dataclass(frozen=True)
class NuclearSpecies:
    name: str
    half_life: float          # s
    gamma_energy: float       # MeV
    molar_mass: float = 0.0   # g/mol, 0 = unknown

    def __post_init__(self):
        if not (math.isfinite(self.half_life) and self.half_life > 0):
            raise ConfigError("half_life", f"must be > 0, got {self.half_life!r}")
        if not (math.isfinite(self.gamma_energy) and self.gamma_energy > 0):
            raise ConfigError("gamma_energy", f"must be > 0, got {self.gamma_energy!r}")
        if self.molar_mass < 0:
            raise ConfigError("molar_mass", "must be >= 0")

    @property
    def omega(self) -> float:
        """Gap of the emitted gamma in rad/s."""
        return mev_to_rad_per_s(self.gamma_energy)


NA20 = NuclearSpecies("Na-20", half_life=0.5, gamma_energy=11.0, molar_mass=20.0)


def load_species_catalog(path: str | Path | None = None) -> Dict[str, NuclearSpecies]:
    """Katalog lesen; Na-20 ist immer enthalten."""
    catalog = {NA20.name: NA20}
    p = Path(path) if path else DEFAULT_CATALOG
    if not p.exists():
        if path:
            raise ConfigError("catalog", f"species catalog not found: {p}")
        return catalog
    doc = read_yaml(p) or {}
    version = int(doc.get("version", 0))
    if version != CATALOG_VERSION:
        raise ConfigError("catalog", f"unsupported catalog version {version} in {p}")
    for entry in doc.get("species", []) or []:
        try:
            sp = NuclearSpecies(
                name=str(entry["name"]),
                half_life=float(entry["half_life_s"]),
                gamma_energy=float(entry["gamma_energy_mev"]),
                molar_mass=float(entry.get("molar_mass_g_mol", 0.0)),
            )
        except KeyError as e:
            raise ConfigError("catalog", f"species entry missing field {e.args[0]!r}")
        catalog[sp.name] = sp
    return catalog


def get_species(name: str, catalog: Optional[Dict[str, NuclearSpecies]] = None) -> NuclearSpecies:
    catalog = catalog if catalog is not None else load_species_catalog()
    for key, sp in catalog.items():
        if key.lower() == str(name).strip().lower():
            return sp
    raise ConfigError("species", f"unknown species {name!r}, known: {sorted(catalog)}")


def atoms_from_grams(grams: float, species: NuclearSpecies) -> float:
    if species.molar_mass <= 0:
        raise ConfigError("molar_mass", f"no molar mass for {species.name}")
    if not (math.isfinite(grams) and grams > 0):
        raise ConfigError("grams", f"must be > 0, got {grams!r}")
    return grams / species.molar_mass * AVOGADRO


@dataclass(frozen=True)
class ExperimentPlan:
    n_atoms: float
    duration: float
    efficiency: float = 1.0
    decay_convention: DecayConvention = DecayConvention.PAPER
    statistics_criterion: StatisticsCriterion = StatisticsCriterion.PAPER_INVERSE

    def __post_init__(self):
        if not (math.isfinite(self.n_atoms) and self.n_atoms >= 0):
            raise ConfigError("n_atoms", f"must be >= 0, got {self.n_atoms!r}")
        if not (math.isfinite(self.duration) and self.duration >= 0):
            raise ConfigError("duration", f"must be >= 0, got {self.duration!r}")
        if not (0.0 < self.efficiency <= 1.0):
            raise ConfigError("efficiency", f"must lie in (0, 1], got {self.efficiency!r}")
        try:
            object.__setattr__(self, "decay_convention", DecayConvention(self.decay_convention))
        except ValueError:
            raise ConfigError("decay_convention", f"unknown convention {self.decay_convention!r}")
        try:
            object.__setattr__(self, "statistics_criterion", StatisticsCriterion(self.statistics_criterion))
        except ValueError:
            raise ConfigError("statistics_criterion", f"unknown criterion {self.statistics_criterion!r}")


def gamma_events(n_atoms: float, species: NuclearSpecies, duration: float,
                 convention: DecayConvention | str = DecayConvention.PAPER) -> float:
    if duration < 0:
        raise PlannerError(f"duration must be >= 0, got {duration!r}")
    convention = DecayConvention(convention)
    ln2 = math.log(2.0)
    if convention is DecayConvention.PAPER:
        rate = 1.0 / (species.half_life * ln2)
    else:
        rate = ln2 / species.half_life
    return n_atoms * -math.expm1(-rate * duration)


def min_resolvable_delta(detected_events: float,
                         criterion: StatisticsCriterion | str = StatisticsCriterion.PAPER_INVERSE) -> float:
    if not (detected_events > 0):
        raise PlannerError(f"no detected events ({detected_events!r}); delta undefined")
    if StatisticsCriterion(criterion) is StatisticsCriterion.PAPER_INVERSE:
        return 1.0 / detected_events
    return 1.0 / math.sqrt(detected_events)


def nonlocality_bound(delta: float, omega: float, c: float = C_LIGHT) -> float:
    """l_n = c sqrt(delta) / |Omega| in metres."""
    if not (delta > 0):
        raise PlannerError(f"delta must be > 0, got {delta!r}")
    if omega == 0 or not math.isfinite(omega):
        raise PlannerError(f"omega must be finite and nonzero, got {omega!r}")
    return c * math.sqrt(delta) / abs(omega)


@dataclass(frozen=True)
class ConfoundReport:
    omega_energy: float
    flagged_masses: List[float]
    clean: bool
    clean_threshold_mev: float


def confound_check(omega_energy: float, candidate_masses: Sequence[float] = ()) -> ConfoundReport:
    """A massive field of mass m contributes to emission only if 2m < |Omega|."""
    if not (math.isfinite(omega_energy) and omega_energy > 0):
        raise PlannerError(f"omega_energy must be > 0, got {omega_energy!r}")
    flagged = [float(m) for m in candidate_masses if 2.0 * float(m) < omega_energy]
    return ConfoundReport(float(omega_energy), flagged, not flagged, 2.0 * ELECTRON_MASS_MEV)


@dataclass(frozen=True)
class PlanReport:
    species: str
    n_atoms: float
    duration: float
    efficiency: float
    decay_convention: str
    statistics_criterion: str
    omega: float
    omega_energy_mev: float
    gamma_events: float
    detected_events: float
    min_delta: float
    l_n_bound: float
    l_n_bound_display: str
    confound: ConfoundReport
    confound_free_omega: float
    confound_free_bound: float
    confound_free_degradation: float
    notes: List[str] = field(default_factory=list)


def plan(experiment: ExperimentPlan, species: NuclearSpecies, omega: Optional[float] = None,
         candidate_masses: Sequence[float] = (ELECTRON_MASS_MEV,), sig_figs: int = 1) -> PlanReport:
    """
    gamma_events -> x efficiency -> min_resolvable_delta -> nonlocality_bound,
    every intermediate reported. omega defaults to the species' gamma line.
    """
    omega = species.omega if omega is None else float(omega)
    n_gamma = gamma_events(experiment.n_atoms, species, experiment.duration, experiment.decay_convention)
    detected = experiment.efficiency * n_gamma
    delta = min_resolvable_delta(detected, experiment.statistics_criterion)
    bound = nonlocality_bound(delta, omega)

    energy = rad_per_s_to_mev(omega)
    confound = confound_check(abs(energy), candidate_masses)
    clean_omega = mev_to_rad_per_s(confound.clean_threshold_mev)
    clean_bound = nonlocality_bound(delta, clean_omega)

    notes: List[str] = []
    if not confound.clean:
        notes.append(f"gap {abs(energy):.4g} MeV exceeds 2m for masses {confound.flagged_masses}; "
                     f"restricting to |Ω| < {confound.clean_threshold_mev:.4g} MeV weakens the bound "
                     f"by {clean_bound / bound:.3g}x")
    log_info(f"plan {species.name}: detected={detected:.3e} delta_min={delta:.3e} l_n<={bound:.3e} m")
    return PlanReport(
        species=species.name, n_atoms=experiment.n_atoms, duration=experiment.duration,
        efficiency=experiment.efficiency, decay_convention=experiment.decay_convention.value,
        statistics_criterion=experiment.statistics_criterion.value,
        omega=omega, omega_energy_mev=energy,
        gamma_events=n_gamma, detected_events=detected, min_delta=delta,
        l_n_bound=bound, l_n_bound_display=fmt_sig(bound, sig_figs),
        confound=confound, confound_free_omega=clean_omega, confound_free_bound=clean_bound,
        confound_free_degradation=clean_bound / bound, notes=notes,
    )
