import time

import numpy as np
import pytest

from tdcr_sim.dynamics import RodModel, bdf_coeffs
from tdcr_sim.rod import RodParams, TendonLayout, default_paper_rod
from tdcr_sim.scenarios import Scenario, run_closed_loop

FAST_NODES = 40

_RUNS = {}


def cached_run(controller, kind="nominal", mass=0.0, nodes=200, **kw):
    """Closed-loop runs are expensive at N=200; share them across test modules."""
    key = (controller, kind, mass, nodes, tuple(sorted(kw.items())))
    if key not in _RUNS:
        params, layout = default_paper_rod(nodes=nodes)
        if "gravity" in kw:
            params = params.with_(gravity=np.asarray(kw["gravity"], float))
        start = time.perf_counter()
        trace = run_closed_loop(controller, Scenario(kind, weight_mass=mass), horizon=kw.get("horizon", 100),
                                params=params, layout=layout)
        trace.wall_time = time.perf_counter() - start
        _RUNS[key] = trace
    return _RUNS[key]


@pytest.fixture(scope="session")
def paper_rod():
    return default_paper_rod()


@pytest.fixture(scope="session")
def fast_rod():
    return default_paper_rod(nodes=FAST_NODES)


@pytest.fixture
def weightless_model():
    params = RodParams(gravity=np.zeros(3), nodes=FAST_NODES)
    return RodModel(params, TendonLayout.symmetric())


@pytest.fixture
def fast_model(fast_rod):
    return RodModel(*fast_rod)


@pytest.fixture
def coeffs():
    return bdf_coeffs(0.01, -0.2)
