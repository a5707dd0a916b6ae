import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from papertab import kernels  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def backend_modules():
    return [kernels.get_backend(name) for name in kernels.available_backends()]


@pytest.fixture(params=kernels.available_backends())
def kernel_backend(request):
    """Runs a test once per importable kernel backend."""
    return kernels.get_backend(request.param)
