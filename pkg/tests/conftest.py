import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

# Row-level parallelism off by default: the tests that exercise it opt in.
os.environ.setdefault("QCD_SRP_THREADS", "1")


@pytest.fixture(scope="session")
def model_unit():
    from qcd_srp import Model
    return Model(1.0)


@pytest.fixture(scope="session")
def eigen_mu1_a10():
    from qcd_srp import Model, solve_lambda
    return solve_lambda(Model(1.0), 10.0)


@pytest.fixture(scope="session")
def qsd_mu1_a10(eigen_mu1_a10):
    from qcd_srp import QsdEval
    return QsdEval(eigen_mu1_a10)
