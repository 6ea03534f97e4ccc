import numpy as np
import pytest

from femtosim import NetworkConfig


@pytest.fixture
def config():
    return NetworkConfig().validate()


@pytest.fixture
def fixed_config():
    return NetworkConfig(femtocell_count_mode="fixed").validate()


@pytest.fixture
def tiny_config():
    """Two channels, two macro users, one femto user per cell."""
    return NetworkConfig(
        n_channels=2, n_macro_users=2, n_femto_users_per_cell=1,
        gamma=2, n_f_mean=2.0, femtocell_count_mode="fixed",
    ).validate()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
