import numpy as np
import pytest

from core.spin_algebra import HilbertSpace, coherent_x_state
from models.experiment_models import ExperimentConfig
from models.spin_models import SpinChainParams


@pytest.fixture
def space3():
    return HilbertSpace(3)


@pytest.fixture
def space4():
    return HilbertSpace(4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def chain_params():
    """작은 비정합 체인 (N=4)"""
    return SpinChainParams(n_sites=4, chi=1.0, alpha=1.3, beta=0.7)


@pytest.fixture
def coherent4(space4):
    return coherent_x_state(space4)


@pytest.fixture
def output_dir(tmp_path):
    return str(tmp_path / "out")


@pytest.fixture
def small_config(output_dir):
    def make(**fields) -> ExperimentConfig:
        base = {"n_sites": 4, "time_samples": 16, "output_dir": output_dir, "threads": 1}
        base.update(fields)
        return ExperimentConfig(**base)
    return make
