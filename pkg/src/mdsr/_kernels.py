"""Hot kernel for the probe susceptibility over a detuning grid.

Two interchangeable implementations: a numba @njit loop (default) and a
vectorized pure-numpy fallback.  Selection happens at import time; set
the environment variable MDSR_NO_NUMBA=1 to force the numpy path (also
used automatically when numba is unavailable).  Both paths compute

    chi(dp) = sum_i C * P_i * amp_i^2 * (i/2) / D_i(dp)
    D_i = gamma_ac + i(dp - dps_i) + (wc_i^2/4) / (gamma_ab + i((dp - dps_i) - (dc - dcs_i)))

with everything in linear MHz and C the dimensionless susceptibility
prefactor.
"""

from __future__ import annotations

import os

import numpy as np


def _chi_grid_numpy(deltas, pops, amp2, omega_c, dp_shift, dc_shift,
                    delta_c, gamma_ab, gamma_ac, prefactor):
    dp = deltas[:, None] - dp_shift[None, :]
    two_photon = dp - (delta_c - dc_shift)[None, :]
    denom = gamma_ac + 1j * dp
    denom = denom + (omega_c[None, :] ** 2 / 4.0) / (gamma_ab + 1j * two_photon)
    terms = prefactor * pops[None, :] * amp2[None, :] * (0.5j / denom)
    return terms.sum(axis=1)


def _chi_grid_loop(deltas, pops, amp2, omega_c, dp_shift, dc_shift,
                   delta_c, gamma_ab, gamma_ac, prefactor):
    n = deltas.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        acc = 0.0 + 0.0j
        for i in range(pops.shape[0]):
            dp = deltas[k] - dp_shift[i]
            two_photon = dp - (delta_c - dc_shift[i])
            denom = gamma_ac + 1j * dp
            denom = denom + (omega_c[i] * omega_c[i] / 4.0) / (gamma_ab + 1j * two_photon)
            acc += pops[i] * amp2[i] * (0.5j / denom)
        out[k] = prefactor * acc
    return out


NUMBA_ENABLED = False
if os.environ.get("MDSR_NO_NUMBA", "0") not in ("1", "true", "yes"):
    try:
        from numba import njit

        chi_grid = njit(cache=True)(_chi_grid_loop)
        NUMBA_ENABLED = True
    except ImportError:
        chi_grid = _chi_grid_numpy
else:
    chi_grid = _chi_grid_numpy

chi_grid_numpy = _chi_grid_numpy
