# test/conftest.py
import os

import pytest


@pytest.fixture(scope="session", autouse=True)
def set_test_env():
    os.environ["RADON_INVERSION_THREADS"] = "1"
