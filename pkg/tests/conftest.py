import numpy as np
import pytest

from mdsr.bloch import DecayModel, LaserField
from mdsr.levels import Manifold, build_level_scheme
from mdsr.spectrum import ExperimentModel

REFERENCE_POPS = [
    (0.32, 0.36, 0.32),
    (0.96, 0.02, 0.02),
    (0.01, 0.01, 0.98),
    (0.01, 0.98, 0.01),
]


def make_model(b_field=0.15, n_f1=1.2e11, omega_c=78.0, omega_p=1.0):
    return ExperimentModel(
        scheme=build_level_scheme(b_field),
        coupling=LaserField(0, omega_c, 0.0, (Manifold.G2, Manifold.E2)),
        probe=LaserField(-1, omega_p, 0.0, (Manifold.G1, Manifold.E2)),
        decay=DecayModel(2.0, 4.0),
        n_f1=n_f1,
        path_length_mm=2.0,
        wavelength_nm=795.0,
    )


@pytest.fixture(scope="session")
def reference_model():
    return make_model()


@pytest.fixture(scope="session")
def reference_model_b0():
    return make_model(b_field=0.0)


@pytest.fixture(scope="session")
def grid161():
    return np.linspace(-80.0, 80.0, 161)
