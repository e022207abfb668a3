import functools

import pytest

from ethercpn.cli import simulate
from ethercpn.switch import BUILTIN


@functools.lru_cache(maxsize=None)
def builtin_run(name: str, seed: int = None):
    sc = BUILTIN[name]()
    if seed is not None:
        import dataclasses

        sc = dataclasses.replace(sc, seed=seed)
    return simulate(sc)


@pytest.fixture(scope="session")
def runs():
    return builtin_run
