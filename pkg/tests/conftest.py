import numpy as np
import pytest

from archspace import build_arch_graph, nasbench201_space, toy27_space
from archspace.distances import apsp_sampled


@pytest.fixture(scope="session")
def toy_spec():
    return toy27_space()


@pytest.fixture(scope="session")
def nas201_spec():
    return nasbench201_space()


@pytest.fixture(scope="session")
def toy_graph(toy_spec):
    return build_arch_graph(toy_spec, list(range(toy_spec.size())))


@pytest.fixture(scope="session")
def toy_apsp(toy_graph):
    return apsp_sampled(toy_graph)


@pytest.fixture(scope="session")
def nas201_graph(nas201_spec):
    rng = np.random.default_rng(7)
    sampled = sorted(rng.choice(nas201_spec.size(), 100, replace=False).tolist())
    return build_arch_graph(nas201_spec, sampled)
