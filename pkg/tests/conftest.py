import numpy as np
import pytest

from tracecone.algebra import BlockAlgebra

ALGEBRAS = {
    "M2": BlockAlgebra.matrices(2),
    "M4": BlockAlgebra.matrices(4),
    "M2+M3": BlockAlgebra.from_dims((2, 3), (0.4, 0.6)),
}


@pytest.fixture(params=sorted(ALGEBRAS))
def alg(request):
    return ALGEBRAS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def m2():
    return BlockAlgebra.matrices(2)


@pytest.fixture
def scalars():
    return BlockAlgebra.matrices(1)
