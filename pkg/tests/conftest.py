import pathlib

import numpy as np
import pytest

from sitescope import load_registry, parse_schedule, read_clip_set, read_embedding_table

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def registry():
    return load_registry((FIXTURES / "table1_registry.json").read_text())


@pytest.fixture(scope="session")
def schedule():
    return parse_schedule((FIXTURES / "site_schedule.json").read_text())


@pytest.fixture(scope="session")
def class_table():
    return read_embedding_table((FIXTURES / "class_embeddings_d32.txt").read_text())


@pytest.fixture(scope="session")
def e2e_clips():
    return read_clip_set((FIXTURES / "clips_e2e.txt").read_text())


def random_unit(rng, dim):
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)
