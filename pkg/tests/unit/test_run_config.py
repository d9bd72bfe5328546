from pathlib import Path

import pytest

from src.config import PROJECT_ROOT, settings
from src.errors import ConfigError
from src.harness.run_config import RunConfig, load_run_config, parse_run_config
from src.harness.session import episode_rng
from src.usersim.error_model import ENVIRONMENTS


@pytest.mark.parametrize("path", sorted((PROJECT_ROOT / "configs").glob("*.yaml")), ids=lambda p: p.stem)
def test_bundled_configs_load(path):
    config = load_run_config(path)
    assert config.policies.keys() == {obj.id for obj in config.world}


def test_defaults():
    config = parse_run_config("")
    assert config.environment == "env1"
    assert config.max_turns == 25
    assert (config.reward.success, config.reward.turn) == (30.0, -1.0)
    assert config.kb.generate is not None


class TestParseErrors:
    def test_unknown_key(self):
        with pytest.raises(ConfigError) as info:
            parse_run_config("colour: 3\n", "run.yaml")
        assert info.value.location == "run.yaml:colour"

    def test_bad_yaml(self):
        with pytest.raises(ConfigError, match="parse error"):
            parse_run_config("seeds: [0, 1\n", "run.yaml")

    def test_not_a_mapping(self):
        with pytest.raises(ConfigError, match="mapping"):
            parse_run_config("- 1\n- 2\n")

    def test_duplicate_seeds(self):
        with pytest.raises(ConfigError, match="unique"):
            parse_run_config("seeds: [1, 1]\n")

    def test_policies_must_cover_world(self):
        with pytest.raises(ConfigError, match="exactly the world objects"):
            parse_run_config("policies: {CamHotels: handcrafted}\n")

    def test_unknown_policy_kind(self):
        with pytest.raises(ConfigError, match="unknown policy kind"):
            parse_run_config("policies: {CamHotels: handcrafted, CamRestaurants: dqn}\n")

    def test_relation_probability_range(self):
        with pytest.raises(ConfigError) as info:
            parse_run_config("relation_probability: 1.5\n", "run.yaml")
        assert info.value.location == "run.yaml:relation_probability"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_run_config(tmp_path / "absent.yaml")

    def test_unknown_object_type(self, make_config):
        config = make_config(
            world=[{"id": "Taxi", "type": "CamTaxis"}], policies={"Taxi": "handcrafted"}
        )
        with pytest.raises(ConfigError, match="CamTaxis"):
            config.load_resources()


class TestDerived:
    def test_overrides(self, make_config):
        config = make_config(seeds=[0, 1, 2]).with_overrides(seed=7, relation_probability=0.5)
        assert config.seeds == [7]
        assert config.relation_probability == 0.5

    def test_bad_override(self, make_config):
        with pytest.raises(ConfigError):
            make_config().with_overrides(relation_probability=2.0)

    def test_config_hash(self, make_config):
        a = make_config()
        assert a.config_hash() == make_config().config_hash()
        assert len(a.config_hash()) == 12
        assert a.config_hash() != a.with_overrides(relation_probability=0.5).config_hash()

    def test_baseline_disables_relations(self, make_config):
        config = make_config(policies={"CamHotels": "handcrafted", "CamRestaurants": "mddm-baseline"})
        assert not config.relations_enabled
        assert config.trainable
        assert make_config().relations_enabled
        assert not make_config().trainable

    def test_environments(self, make_config):
        assert make_config(environment="env3").error_model == ENVIRONMENTS["env3"]
        custom = make_config(environment={"ser": 0.3, "nbest": 5})
        assert custom.env_name == "ser0.3-n5"

    def test_output_root(self, make_config, monkeypatch, tmp_path):
        config = make_config(output_dir=Path("runs/exp1"))
        assert config.resolved_output_dir() == Path("runs/exp1")
        monkeypatch.setattr(settings, "output_root", tmp_path / "elsewhere")
        assert config.resolved_output_dir() == tmp_path / "elsewhere" / "exp1"

    def test_bundled_records(self, make_config, kb):
        types, loaded = make_config().load_resources()
        assert [t.name for t in types] == ["CamHotels", "CamRestaurants"]
        assert loaded.records("CamHotels") == kb.records("CamHotels")

    def test_generated_records(self, make_config):
        config = make_config(kb={"generate": {"seed": 1, "sizes": {"CamHotels": 20, "CamRestaurants": 20}}})
        _, kb = config.load_resources()
        assert len(kb.records("CamHotels")) == 20


def test_episode_rng_streams():
    assert episode_rng(0, "train", 3).random() == episode_rng(0, "train", 3).random()
    assert episode_rng(0, "train", 3).random() != episode_rng(0, "test", 3).random()
    assert episode_rng(0, "train", 3).random() != episode_rng(1, "train", 3).random()
