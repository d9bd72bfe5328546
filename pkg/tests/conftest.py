"""Shared fixtures: the bundled Cambridge ontology, a fresh world and small run configs."""

from pathlib import Path

import numpy as np
import pytest

from src.acts.grammar import parse_act
from src.config import DEFAULT_ONTOLOGY_PATH, settings
from src.entities.world import new_world
from src.harness.run_config import RunConfig
from src.ontology.loader import load_ontology

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    """Keep runs inside tmp directories whatever the developer's environment says."""
    monkeypatch.setattr(settings, "output_root", None)
    monkeypatch.setattr(settings, "database_url", None)
    monkeypatch.setattr(settings, "workers", 1)
    monkeypatch.setattr(settings, "sentry_dsn", None)


@pytest.fixture(scope="session")
def ontology():
    return load_ontology(DEFAULT_ONTOLOGY_PATH)


@pytest.fixture(scope="session")
def types(ontology):
    return ontology[0]


@pytest.fixture(scope="session")
def kb(ontology):
    return ontology[1]


@pytest.fixture(scope="session")
def hotel_type(types):
    return next(t for t in types if t.name == "CamHotels")


@pytest.fixture(scope="session")
def restaurant_type(types):
    return next(t for t in types if t.name == "CamRestaurants")


@pytest.fixture
def world(hotel_type, restaurant_type):
    return new_world([("CamHotels", hotel_type), ("CamRestaurants", restaurant_type)])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def act():
    """Shorthand parser: ``act('inform(CamHotels#area="north")')``."""
    return parse_act


@pytest.fixture
def make_config(tmp_path):
    """
    Small run configs on the hand-written knowledge base.

    Usage:
        config = make_config(policies={...}, train_dialogues=10)
    """

    def factory(**overrides) -> RunConfig:
        data = {
            "experiment": "test",
            "environment": "env1",
            "policies": {"CamHotels": "handcrafted", "CamRestaurants": "handcrafted"},
            "train_dialogues": 0,
            "test_dialogues": 5,
            "seeds": [0],
            "output_dir": tmp_path / "run",
            "kb": {},
            "learner": {"kind": "linear-sarsa"},
        }
        data.update(overrides)
        return RunConfig.model_validate(data)

    return factory


def load_dialogue(name: str) -> list[tuple[int, str, str]]:
    """
    Read a transcript fixture: ``Tnn SYS act`` / ``Tnn USR act`` lines, ``#`` comments.

    Returns:
        (turn, role, act text) triples in file order
    """
    turns = []
    for line in (FIXTURES / name).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tag, role, text = line.split(" ", 2)
        turns.append((int(tag[1:]), role, text))
    return turns


@pytest.fixture
def transcript():
    return load_dialogue
