from pathlib import Path

import numpy as np
import pytest

from utcontrol.plants import PlantModel

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(scope="session")
def config_dir() -> Path:
    return CONFIG_DIR


class ChannelEchoPlant(PlantModel):
    """Test plant whose output is one chosen element of the last applied control."""

    def __init__(self, channel: int = 0, dim: int = 1):
        self.channel = channel
        self.dim = dim

    def state_dim(self) -> int:
        return 1

    def step(self, x, u, dt):
        return np.array([float(u[self.channel])])

    def output(self, x):
        return np.array([float(x[0])])
