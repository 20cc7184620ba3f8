import numpy as np
import pytest

from cpfsim.harness import run_preset
from cpfsim.lattice import build_heisenberg, build_hubbard_spinless, build_tfim


@pytest.fixture(scope="session")
def heis4():
    return build_heisenberg(4)


@pytest.fixture(scope="session")
def tfim_weak():
    return lambda alpha: build_tfim(4, J=alpha, regime="weak-coupling")


@pytest.fixture(scope="session")
def hubbard_weakhop():
    return lambda alpha: build_hubbard_spinless(4, t_hop=alpha, U_int=1.0,
                                                regime="weak-hopping")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def fig_pert_rows():
    return [row.__dict__ for row in run_preset("fig-pert").rows]


@pytest.fixture(scope="session")
def fig_nonpert_rows():
    return [row.__dict__ for row in run_preset("fig-nonpert").rows]
