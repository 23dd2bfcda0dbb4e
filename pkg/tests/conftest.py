import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.netpbm import write_pgm  # noqa: E402
from src.samples import text_page, textured_host  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def host():
    return textured_host(256, 256, seed=1)


@pytest.fixture(scope="session")
def page():
    return text_page(128, 128, seed=2)


@pytest.fixture(scope="session")
def big_host():
    return textured_host(512, 512, seed=3)


@pytest.fixture(scope="session")
def big_page():
    return text_page(512, 512, seed=4)


@pytest.fixture
def image_files(tmp_path, host, page):
    host_file = tmp_path / "host.pgm"
    page_file = tmp_path / "page.pgm"
    write_pgm(host_file, host)
    write_pgm(page_file, page)
    return host_file, page_file
