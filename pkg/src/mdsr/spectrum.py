"""Probe susceptibility and transmission spectra.

The total susceptibility is the population-weighted sum of three
independent probe terms (one per F=1 ground sublevel), each a weak-probe
Lambda (or bare two-level, where the coupling partner is forbidden)
coherence.  The full Liouvillian solver in `bloch` serves as the
cross-validation oracle for this additive production path.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._kernels import chi_grid
from .bloch import DecayModel, LaserField
from .levels import LevelScheme, Manifold, Sublevel

HBAR_JS = 1.054571817e-34
EPSILON0_F_PER_M = 8.8541878128e-12
RAD_PER_S_PER_MHZ = 2.0 * math.pi * 1.0e6


@dataclass(frozen=True)
class PopulationDistribution:
    """Populations of the F=1 ground sublevels a_-1, a_0, a_+1."""

    p_minus: float
    p_zero: float
    p_plus: float

    def __post_init__(self):
        for name, p in (("p_minus", self.p_minus), ("p_zero", self.p_zero), ("p_plus", self.p_plus)):
            if not -1e-12 <= p <= 1.0 + 1e-12:
                raise ValueError(f"{name}={p} outside [0, 1]")
        if abs(self.p_minus + self.p_zero + self.p_plus - 1.0) > 1e-9:
            raise ValueError("populations must sum to 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_minus, self.p_zero, self.p_plus])


@dataclass(frozen=True)
class ExperimentModel:
    """Complete forward-model parameter set for one probe-transmission scan."""

    scheme: LevelScheme
    coupling: LaserField   # pi, G2 -> E2
    probe: LaserField      # sigma-, G1 -> E2
    decay: DecayModel
    n_f1: float            # atoms/cm^3 in the F=1 ground manifold
    path_length_mm: float
    wavelength_nm: float

    def __post_init__(self):
        if self.n_f1 < 0:
            raise ValueError("n_f1 must be >= 0")
        if self.path_length_mm <= 0:
            raise ValueError("path_length_mm must be > 0")
        if self.wavelength_nm <= 0:
            raise ValueError("wavelength_nm must be > 0")
        if self.coupling.rabi_scale > 0 and self.probe.rabi_scale > 0.2 * self.coupling.rabi_scale:
            warnings.warn(
                "probe Rabi scale is not small compared to the coupling; "
                "the weak-probe susceptibility may be inaccurate",
                stacklevel=2,
            )


@dataclass(frozen=True)
class Spectrum:
    detunings: np.ndarray          # MHz, strictly increasing
    transmission: np.ndarray       # fractions in [0, 1]
    noise_sigma: float = 0.0

    def __post_init__(self):
        det = np.asarray(self.detunings, dtype=float)
        tr = np.asarray(self.transmission, dtype=float)
        object.__setattr__(self, "detunings", det)
        object.__setattr__(self, "transmission", tr)
        if det.shape != tr.shape or det.ndim != 1:
            raise ValueError("detunings and transmission must be 1-d arrays of equal length")
        if det.size > 1 and not np.all(np.diff(det) > 0):
            raise ValueError("detunings must be strictly increasing")
        if tr.size and (tr.min() < -1e-12 or tr.max() > 1.0 + 1e-12):
            raise ValueError("transmission values must lie in [0, 1]")

    def __len__(self) -> int:
        return self.detunings.size


def susceptibility_prefactor(n_f1_cm3: float, reduced_dipole_cm: float) -> float:
    """Dimensionless scale N |mu|^2 / (hbar eps0 Omega_rad) per MHz of Rabi.

    Owns the single MHz -> rad/s conversion of the susceptibility formula;
    all remaining frequency ratios stay in linear MHz.
    """
    n_m3 = n_f1_cm3 * 1.0e6
    return n_m3 * reduced_dipole_cm**2 / (HBAR_JS * EPSILON0_F_PER_M * RAD_PER_S_PER_MHZ)


def _term_parameters(model: ExperimentModel):
    """Per-term arrays (probe amp^2, partner coupling Rabi, Zeeman offsets)
    for the three F=1 probe transitions, ordered a_-1, a_0, a_+1."""
    scheme = model.scheme
    gman, eman = model.probe.transition
    cgman, ceman = model.coupling.transition
    amp2, omega_c, dp_shift, dc_shift = [], [], [], []
    for m in range(-gman.f, gman.f + 1):
        a = Sublevel(gman, m)
        mc = m + model.probe.q
        if abs(mc) > eman.f:
            amp2.append(0.0)
            omega_c.append(0.0)
            dp_shift.append(0.0)
            dc_shift.append(0.0)
            continue
        c = Sublevel(eman, mc)
        rel_p = scheme.coupling(a, c, model.probe.q)
        mb = c.m - model.coupling.q
        if abs(mb) <= cgman.f:
            b = Sublevel(cgman, mb)
            rel_c = scheme.coupling(b, c, model.coupling.q)
            zb = scheme.zeeman[b]
        else:
            rel_c, zb = 0.0, 0.0
        amp2.append(rel_p * rel_p)
        omega_c.append(abs(rel_c) * model.coupling.rabi_scale)
        dp_shift.append(scheme.zeeman[c] - scheme.zeeman[a])
        dc_shift.append(scheme.zeeman[c] - zb)
    return (np.array(amp2), np.array(omega_c), np.array(dp_shift), np.array(dc_shift))


def susceptibility_grid(model: ExperimentModel, pops: PopulationDistribution,
                        deltas: np.ndarray) -> np.ndarray:
    """Complex probe susceptibility at each detuning (MHz) in deltas."""
    amp2, omega_c, dp_shift, dc_shift = _term_parameters(model)
    pref = susceptibility_prefactor(model.n_f1, model.scheme.reduced_dipole)
    return chi_grid(
        np.ascontiguousarray(deltas, dtype=np.float64),
        pops.as_array(), amp2, omega_c, dp_shift, dc_shift,
        model.coupling.detuning, model.decay.gamma_ab, model.decay.gamma_ac, pref,
    )


def susceptibility(model: ExperimentModel, pops: PopulationDistribution,
                   delta_p: float) -> complex:
    return complex(susceptibility_grid(model, pops, np.array([float(delta_p)]))[0])


def transmission(chi: complex, model: ExperimentModel) -> float:
    """Beer-Lambert readout T = exp(-k L Im chi), k = 2 pi / wavelength."""
    im = chi.imag if np.isscalar(chi) or isinstance(chi, complex) else np.imag(chi)
    if np.min(im) < -1e-12:
        raise ValueError("Im chi must be non-negative (passive medium)")
    k_per_m = 2.0 * math.pi / (model.wavelength_nm * 1e-9)
    length_m = model.path_length_mm * 1e-3
    return np.exp(-k_per_m * length_m * np.maximum(im, 0.0))


def synth_spectrum(model: ExperimentModel, pops: PopulationDistribution,
                   grid) -> Spectrum:
    """Clean transmission spectrum on a strictly increasing detuning grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        return Spectrum(grid, np.array([]))
    chi = susceptibility_grid(model, pops, grid)
    return Spectrum(grid, np.asarray(transmission(chi, model)))


def add_noise(s: Spectrum, sigma: float, seed: int) -> Spectrum:
    """Gaussian transmission noise, clamped to [0, 1]; deterministic per seed."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return s
    rng = np.random.default_rng(seed)
    noisy = np.clip(s.transmission + rng.normal(0.0, sigma, s.transmission.shape), 0.0, 1.0)
    return Spectrum(s.detunings.copy(), noisy, noise_sigma=sigma)
