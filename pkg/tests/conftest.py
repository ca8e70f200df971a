import numpy as np
import pytest

from colsel import _pykernels
from colsel.linalg import normalize_columns

try:
    from colsel import _kernels
except ImportError:  # extension not built
    _kernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
if _kernels is not None:
    BACKENDS.insert(0, pytest.param(_kernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_unit_matrix(rng, n, p):
    return normalize_columns(rng.standard_normal((n, p)))


def random_psd(rng, n, rank=None):
    rank = n if rank is None else rank
    B = rng.standard_normal((n, rank))
    return B @ B.T
