"""Rotating-wave Hamiltonian, Lindblad generator and steady states for the sublevel system.

All frequencies are linear MHz; time is microseconds implicitly (1/MHz).
The decay model maps the two phenomenological coherence decays
(gamma_ab for ground-ground, gamma_ac for optical) onto an excited-state
population decay Gamma = 2(gamma_ac - gamma_ab) branched by squared
dipole amplitudes, plus pure dephasing gamma_ab added to ground-ground
and optical coherences.  With that split the weak-probe Lambda coherence
of `lambda_coherence_analytic` is reproduced exactly by the full model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .levels import LevelScheme, Manifold, Sublevel


@dataclass(frozen=True)
class LaserField:
    """One beam: polarization component q, Rabi scale on the unit-amplitude
    reference transition (MHz), detuning from the zero-field line center (MHz),
    and the (ground manifold, excited manifold) transition it addresses."""

    q: int
    rabi_scale: float
    detuning: float
    transition: tuple  # (Manifold ground, Manifold excited)

    def __post_init__(self):
        if self.q not in (-1, 0, 1):
            raise ValueError(f"q must be -1, 0 or +1, got {self.q}")
        if self.rabi_scale < 0:
            raise ValueError("rabi_scale must be >= 0")
        g, e = self.transition
        if g.is_excited or not e.is_excited:
            raise ValueError("transition must be (ground manifold, excited manifold)")


@dataclass(frozen=True)
class DecayModel:
    gamma_ab: float  # ground-ground coherence decay, MHz
    gamma_ac: float  # optical coherence decay, MHz

    def __post_init__(self):
        if not self.gamma_ac > self.gamma_ab >= 0:
            raise ValueError("require gamma_ac > gamma_ab >= 0")

    @property
    def gamma_excited(self) -> float:
        """Excited-state population decay rate Gamma = 2(gamma_ac - gamma_ab)."""
        return 2.0 * (self.gamma_ac - self.gamma_ab)


class SteadyStateError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def validate_density_matrix(rho: np.ndarray, herm_tol=1e-10, trace_tol=1e-9, pos_tol=1e-9):
    """Raise ValueError unless rho is Hermitian, unit-trace and positive."""
    if np.abs(rho - rho.conj().T).max() > herm_tol:
        raise ValueError("density matrix not Hermitian")
    if abs(np.trace(rho).real - 1.0) > trace_tol or abs(np.trace(rho).imag) > trace_tol:
        raise ValueError("density matrix trace != 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -pos_tol:
        raise ValueError("density matrix not positive semidefinite")


def _frame_offsets(scheme: LevelScheme, fields) -> dict:
    """Rotating-frame energy offset per manifold, propagated across field links."""
    seen_pairs = set()
    for f in fields:
        if f.transition in seen_pairs:
            raise ValueError(f"two fields drive the same transition pair {f.transition}")
        seen_pairs.add(f.transition)

    manifolds = {s.manifold for s in scheme.sublevels}
    offsets = {}
    links = [(f.transition[0], f.transition[1], f.detuning) for f in fields]
    # anchor each connected component at its first-listed manifold
    for man in [Manifold.G1, Manifold.G2, Manifold.E1, Manifold.E2]:
        if man not in manifolds or man in offsets:
            continue
        offsets[man] = 0.0
        stack = [man]
        while stack:
            cur = stack.pop()
            for g, e, det in links:
                if g is cur and e not in offsets:
                    offsets[e] = offsets[g] - det
                    stack.append(e)
                elif e is cur and g not in offsets:
                    offsets[g] = offsets[e] + det
                    stack.append(g)
    return offsets


def build_hamiltonian(scheme: LevelScheme, fields) -> np.ndarray:
    """RWA Hamiltonian in MHz: diagonal = frame offset + Zeeman shift,
    off-diagonal = -Omega/2 per driven pair (Omega = rabi_scale * amplitude)."""
    offsets = _frame_offsets(scheme, fields)
    n = scheme.dim
    h = np.zeros((n, n), dtype=complex)
    for i, s in enumerate(scheme.sublevels):
        h[i, i] = offsets[s.manifold] + scheme.zeeman[s]
    for f in fields:
        gman, eman = f.transition
        for (lo, up, q), amp in scheme.couplings.items():
            if q == f.q and lo.manifold is gman and up.manifold is eman:
                i, j = scheme.index(lo), scheme.index(up)
                h[i, j] += -0.5 * f.rabi_scale * amp
                h[j, i] += -0.5 * f.rabi_scale * amp
    return h


def _decay_channels(scheme: LevelScheme):
    """(excited index, ground index, branching fraction) with fractions
    normalized per excited sublevel over every dipole-allowed channel."""
    strength = {}
    for (lo, up, _q), amp in scheme.couplings.items():
        strength.setdefault(up, []).append((lo, amp * amp))
    channels = []
    for up, lst in strength.items():
        total = sum(w for _, w in lst)
        for lo, w in lst:
            channels.append((scheme.index(up), scheme.index(lo), w / total))
    return channels


def lindblad_superoperator(h: np.ndarray, jumps) -> np.ndarray:
    """Vectorized generator for rho.reshape(-1) (row-major):
    L = -i(H x I - I x H^T) + sum_k [A x conj(A) - (A^+A x I + I x (A^+A)^T)/2]."""
    n = h.shape[0]
    eye = np.eye(n)
    lmat = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for a in jumps:
        ada = a.conj().T @ a
        lmat += np.kron(a, a.conj())
        lmat -= 0.5 * (np.kron(ada, eye) + np.kron(eye, ada.T))
    return lmat


def build_liouvillian(h: np.ndarray, scheme: LevelScheme, decay: DecayModel) -> np.ndarray:
    """Full generator: coherent part, branched excited-state decay, and the
    phenomenological dephasing that pins coherence decays to gamma_ab/gamma_ac."""
    n = scheme.dim
    if h.shape != (n, n):
        raise ValueError("Hamiltonian dimension does not match scheme")
    gamma = decay.gamma_excited
    if gamma <= 0:
        raise ValueError("excited-state decay rate must be positive")

    jumps = []
    for ei, gi, frac in _decay_channels(scheme):
        a = np.zeros((n, n), dtype=complex)
        a[gi, ei] = np.sqrt(gamma * frac)
        jumps.append(a)
    lmat = lindblad_superoperator(h, jumps)

    # extra dephasing: gamma_ab on ground-ground and ground-excited coherences,
    # so optical coherences decay at Gamma/2 + gamma_ab = gamma_ac total
    excited = np.array([s.manifold.is_excited for s in scheme.sublevels])
    deph = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j and not (excited[i] and excited[j]):
                deph[i, j] = decay.gamma_ab
    lmat -= np.diag(deph.reshape(-1))
    return lmat


def apply_liouvillian(lmat: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return (lmat @ rho.reshape(-1)).reshape(rho.shape)


def evolve(lmat: np.ndarray, rho0: np.ndarray, t: float) -> np.ndarray:
    rho = (expm(lmat * t) @ rho0.reshape(-1)).reshape(rho0.shape)
    return 0.5 * (rho + rho.conj().T)


def steady_state(
    lmat: np.ndarray,
    rho0: np.ndarray,
    kernel_tol: float = 1e-10,
    residual_tol: float = 1e-9,
    max_doublings: int = 64,
) -> np.ndarray:
    """Steady state of the generator.

    A one-dimensional kernel gives the unique trace-1 kernel element
    (independent of rho0).  Degenerate kernels (dark/decoupled subspaces)
    are resolved by propagating rho0 to the long-time limit.
    """
    n2 = lmat.shape[0]
    n = int(round(np.sqrt(n2)))
    lnorm = np.linalg.norm(lmat, 2)
    target = residual_tol * max(lnorm, 1.0)

    _u, svals, vh = np.linalg.svd(lmat)
    kdim = int(np.sum(svals < kernel_tol * max(svals[0], 1.0)))
    if kdim == 1:
        rho = vh[-1].conj().reshape(n, n)
        rho = 0.5 * (rho + rho.conj().T)
        rho = rho / np.trace(rho).real
        res = np.linalg.norm(lmat @ rho.reshape(-1))
        if res > target:
            raise SteadyStateError("kernel element fails residual check", res)
        return rho

    # degenerate kernel: long-time limit from rho0 by repeated squaring
    rho = 0.5 * (rho0 + rho0.conj().T)
    res = np.linalg.norm(lmat @ rho.reshape(-1))
    if res < target:
        return rho
    prop = expm(lmat * (1.0 / max(lnorm, 1.0)))
    for _ in range(max_doublings):
        rho = (prop @ rho.reshape(-1)).reshape(n, n)
        rho = 0.5 * (rho + rho.conj().T)
        rho /= np.trace(rho).real
        res = np.linalg.norm(lmat @ rho.reshape(-1))
        if res < target:
            return rho
        prop = prop @ prop
    raise SteadyStateError("steady state did not converge", res)


def lambda_coherence_analytic(
    omega_p: float,
    omega_c: float,
    delta_p: float,
    delta_c: float,
    gamma_ac: float,
    gamma_ab: float,
) -> complex:
    """First-order weak-probe coherence of a Lambda system (all MHz).

    rho_ac = (i omega_p / 2) / [(gamma_ac + i delta_p)
             + (omega_c^2/4) / (gamma_ab + i(delta_p - delta_c))]

    Sign convention: Im(rho_ac) >= 0 means absorption.  Valid for
    omega_p well below saturation; not enforced.
    """
    denom = gamma_ac + 1j * delta_p
    if omega_c != 0.0:
        raman = gamma_ab + 1j * (delta_p - delta_c)
        if raman == 0.0:
            # undamped two-photon resonance: perfect dark state
            return 0.0 + 0.0j
        denom = denom + (omega_c * omega_c / 4.0) / raman
    return (0.5j * omega_p) / denom


def weak_probe_coherences(
    scheme: LevelScheme,
    coupling: LaserField,
    probe: LaserField,
    decay: DecayModel,
    ground_populations: dict,
    delta_p: float,
) -> np.ndarray:
    """First-order probe response of the full Liouvillian with frozen populations.

    Returns the first-order density-matrix correction: the generator is split
    into L0 (coupling + frames, probe drive removed) and the probe drive, and
    L0 rho1 = -L_drive rho0 is solved with rho0 = diag(ground_populations).
    This is the regime of the additive susceptibility decomposition, where
    ground populations enter as external parameters.

    The result is returned in the sign convention of
    `lambda_coherence_analytic`: with the -Omega/2 Hamiltonian convention the
    raw first-order solution is the negative of the analytic coherence, so it
    is negated here.  Entry [g, e] then equals
    population(g) * lambda_coherence_analytic(amp_probe * omega_p, ...) with
    the signed probe amplitude of that transition.
    """
    probe_at = LaserField(probe.q, probe.rabi_scale, delta_p, probe.transition)
    h_full = build_hamiltonian(scheme, [coupling, probe_at])
    h0 = build_hamiltonian(scheme, [coupling, LaserField(probe.q, 0.0, delta_p, probe.transition)])
    hdrive = h_full - h0

    l0 = build_liouvillian(h0, scheme, decay)
    n = scheme.dim
    rho0 = np.zeros((n, n), dtype=complex)
    for s, p in ground_populations.items():
        rho0[scheme.index(s), scheme.index(s)] = p

    eye = np.eye(n)
    ldrive = -1j * (np.kron(hdrive, eye) - np.kron(eye, hdrive.T))
    rhs = -(ldrive @ rho0.reshape(-1))
    rho1, *_ = np.linalg.lstsq(l0, rhs, rcond=None)
    return -rho1.reshape(n, n)
