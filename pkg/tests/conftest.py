import numpy as np
import pytest

from tailrisk import CVAR, GAUSSIAN, STUDENT_T, VAR, PortfolioProblem, RiskSpec


def three_asset_cov():
    """Diagonal (0.04, 0.02, 0.01) with uniform correlation 0.3."""
    sig = np.sqrt([0.04, 0.02, 0.01])
    corr = np.full((3, 3), 0.3)
    np.fill_diagonal(corr, 1.0)
    return corr * np.outer(sig, sig)


THREE_ASSET_MU = np.array([0.08, 0.05, 0.03])


@pytest.fixture
def gauss_var_problem():
    return PortfolioProblem(THREE_ASSET_MU, three_asset_cov(),
                            RiskSpec(GAUSSIAN, VAR), 0.025)


@pytest.fixture
def t3_cvar_problem():
    return PortfolioProblem(THREE_ASSET_MU, three_asset_cov(),
                            RiskSpec(STUDENT_T, CVAR, 3.0), 1e-4)
