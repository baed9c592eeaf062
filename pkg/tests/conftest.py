import numpy as np
import pytest

from tulp.lp_model import StandardFormLP
from tulp.sparse import SparseMatrix
from tulp.tu import FlowInstanceSpec, gen_min_cost_flow


@pytest.fixture
def lp1() -> StandardFormLP:
    """min x1 + 2 x2  s.t.  x1 + x2 = 1, x >= 0; optimum ((1,0), 1)."""
    return StandardFormLP(SparseMatrix(1, 2, [(0, 0, 1), (0, 1, 1)]),
                          np.array([1.0]), np.array([1.0, 2.0]))


@pytest.fixture
def triangle_lp() -> StandardFormLP:
    """Three-node flow 0->1, 1->2, 0->2 with unit supply, last row dropped."""
    spec = FlowInstanceSpec(3, ((0, 1), (1, 2), (0, 2)),
                            supplies=(1, 0, -1), costs=(1, 1, 1))
    return gen_min_cost_flow(spec)
