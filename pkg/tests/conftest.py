import numpy as np
import pytest

from resolventlab import kernels


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture(params=sorted(["python", "compiled"] if kernels.have_compiled()
                              else ["python"]))
def backend(request):
    """Run a test under each available kernel backend, restoring afterwards."""
    before = kernels.backend_name()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(before)
