from __future__ import annotations

import pytest

from curvlab import registry
from curvlab.oplab import build_quotient_model
from curvlab.metricbasis import build_submodule_model
from curvlab.presentation import presentation_from_dict, quotient_dims


def load(name: str):
    return presentation_from_dict(registry.spec_dict(name))


@pytest.fixture(scope="session")
def veronese_pres():
    return load("veronese")


@pytest.fixture(scope="session")
def veronese_table(veronese_pres):
    # degree 10 so that dropping up to three entries leaves a certifiable fit
    return quotient_dims(veronese_pres, 10)


@pytest.fixture(scope="session")
def veronese_model(veronese_pres, veronese_table):
    return build_quotient_model(veronese_pres, 8, table=veronese_table)


@pytest.fixture(scope="session")
def graph_models():
    return {
        n: build_quotient_model(load(f"graph_d2_N{n}"), 64) for n in (1, 2)
    }


@pytest.fixture(scope="session")
def even_model():
    return build_quotient_model(load("even_d2"), 16)


@pytest.fixture(scope="session")
def even_submodule():
    return build_submodule_model(load("even_d2"), 31)


@pytest.fixture(scope="session")
def z1_submodule():
    return build_submodule_model(load("z1_d2"), 31)


@pytest.fixture(scope="session")
def free_models():
    return {d: build_quotient_model(load(f"free_d{d}"), 13) for d in (1, 2, 3, 4)}
