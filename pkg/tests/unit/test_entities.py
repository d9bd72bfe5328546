import numpy as np
import pytest

from src.acts.addressing import UnknownEntityError
from src.entities.marginal import RELATION_DOMAIN, BeliefError, Marginal, slot_domain
from src.entities.models import NOT_EQUALS, ConversationalObject, WorldError
from src.entities.world import apply_offer, dump_world, new_world, set_focus, update_context
from src.ontology.models import DONTCARE, EQUALS, NONE_VALUE

AREA = slot_domain(("centre", "east", "north", "south", "west"))


class TestMarginal:
    def test_fresh(self):
        marginal = Marginal.fresh(AREA)
        assert marginal.none == 1.0
        assert marginal.is_fresh()
        assert marginal.top() == ("centre", 0.0)
        assert marginal.argmax() == NONE_VALUE

    def test_domain_needs_none(self):
        with pytest.raises(BeliefError):
            Marginal(("north", "south"), [0.5, 0.5])

    def test_must_sum_to_one(self):
        with pytest.raises(BeliefError):
            Marginal.from_mapping(AREA, {"north": 0.5})

    def test_unknown_value(self):
        with pytest.raises(BeliefError):
            Marginal.from_mapping(AREA, {"downtown": 1.0})
        with pytest.raises(BeliefError):
            Marginal.fresh(AREA)["downtown"]

    def test_ranked_excludes_none_and_dontcare(self):
        marginal = Marginal.from_mapping(AREA, {NONE_VALUE: 0.5, DONTCARE: 0.3, "west": 0.2})
        assert marginal.ranked()[0] == ("west", 0.2)
        assert marginal.argmax() == NONE_VALUE

    def test_ties_keep_domain_order(self):
        marginal = Marginal.from_mapping(AREA, {"west": 0.5, "north": 0.5})
        assert [value for value, _ in marginal.ranked()[:2]] == ["north", "west"]

    def test_probs_are_read_only(self):
        marginal = Marginal.fresh(AREA)
        with pytest.raises(ValueError):
            marginal.probs[0] = 0.0

    def test_format(self):
        marginal = Marginal.from_mapping(RELATION_DOMAIN, {NONE_VALUE: 0.1, EQUALS: 0.9})
        assert marginal.format() == f"{NONE_VALUE}:0.1000 {EQUALS}:0.9000"
        assert Marginal.point(AREA, "north") == Marginal.from_mapping(AREA, {"north": 1.0})


class TestWorld:
    def test_one_relation_for_two_objects(self, world):
        assert world.object_ids == ("CamHotels", "CamRestaurants")
        assert world.relation_ids == ("CamHotels-CamRestaurants",)
        rel = world.relation("CamHotels-CamRestaurants")
        assert rel.endpoints == ("CamHotels", "CamRestaurants")
        assert sorted(rel.user_goal) == ["area2area", "pricerange2pricerange"]
        assert all(m.is_fresh() for m in rel.user_goal.values())
        assert not rel.active

    def test_fresh_beliefs(self, world):
        hotel = world.object("CamHotels")
        assert list(hotel.user_goal) == ["kind", "area", "pricerange", "stars"]
        assert hotel.belief("area").domain == AREA
        assert hotel.context.is_empty
        assert world.focus == frozenset()
        assert world.focus_object is None

    def test_duplicate_ids(self, hotel_type):
        with pytest.raises(WorldError):
            new_world([("A", hotel_type), ("A", hotel_type)])

    def test_two_hotels_are_related(self, hotel_type):
        two = new_world([("A", hotel_type), ("B", hotel_type)])
        assert two.relation_ids == ("A-B",)

    def test_unknown_entities(self, world):
        with pytest.raises(UnknownEntityError):
            world.object("CamTaxis")
        with pytest.raises(UnknownEntityError):
            set_focus(world, ["CamTaxis"])

    def test_focus_object_prefers_declaration_order(self, world):
        set_focus(world, ["CamRestaurants", "CamHotels-CamRestaurants", "CamHotels"])
        assert world.focus_object == "CamHotels"

    def test_belief_slots_must_match_type(self, hotel_type):
        with pytest.raises(WorldError):
            ConversationalObject("CamHotels", hotel_type, {"area": Marginal.fresh(AREA)})

    def test_unknown_slot_belief(self, world):
        with pytest.raises(WorldError):
            world.object("CamHotels").belief("food")

    def test_attribute_between_either_orientation(self, world):
        rel = world.relation("CamHotels-CamRestaurants")
        assert rel.attribute_between("CamRestaurants", "area", "CamHotels", "area").name == "area2area"
        assert rel.attribute_between("CamHotels", "pricerange", "CamRestaurants", "pricerange").name == (
            "pricerange2pricerange"
        )
        with pytest.raises(WorldError):
            rel.attribute_between("CamHotels", "area", "CamRestaurants", "pricerange")

    def test_copy_is_independent(self, world):
        snapshot = world.copy()
        hotel = world.object("CamHotels")
        world.put(hotel.with_belief("area", Marginal.point(AREA, "north")))
        assert snapshot.object("CamHotels").belief("area").is_fresh()


class TestContext:
    def test_offer_updates_relation_context(self, world, kb):
        apply_offer(world, "CamHotels", kb.record_by_name("CamHotels", "limehouse"))
        rel = world.relation("CamHotels-CamRestaurants")
        assert rel.context.is_empty

        apply_offer(world, "CamRestaurants", kb.record_by_name("CamRestaurants", "saint johns chop house"))
        rel = world.relation("CamHotels-CamRestaurants")
        assert rel.context.value("area2area") == NOT_EQUALS
        assert rel.context.value("pricerange2pricerange") == EQUALS

    def test_latest_offer_wins(self, world, kb):
        apply_offer(world, "CamHotels", kb.record_by_name("CamHotels", "hobsons house"))
        hotel = apply_offer(world, "CamHotels", kb.record_by_name("CamHotels", "limehouse"))
        assert hotel.context.name == "limehouse"
        assert hotel.context.value("area") == "north"
        assert hotel.offered_names == ("hobsons house", "limehouse")
        assert {"kind", "area", "pricerange", "stars"} <= hotel.history.offered

    def test_record_of_other_type(self, world, kb):
        with pytest.raises(WorldError):
            update_context(world.object("CamHotels"), kb.record_by_name("CamRestaurants", "hakka"))

    def test_offer_without_name(self, world):
        with pytest.raises(WorldError):
            update_context(world.object("CamHotels"), {"area": "north"})


class TestDump:
    def test_fresh_world(self, world):
        text = dump_world(world)
        lines = text.splitlines()
        assert lines[0] == "world greeted=0 closing=0 focus=-"
        assert lines[1] == "object CamHotels (CamHotels) offer=-"
        assert f"  area: {NONE_VALUE}:1.0000" in lines
        assert "relation CamHotels-CamRestaurants active=0" in lines
        assert f"  area2area: {NONE_VALUE}:1.0000 context=-" in lines

    def test_deterministic(self, world, kb):
        apply_offer(world, "CamHotels", kb.record_by_name("CamHotels", "limehouse"))
        hotel = world.object("CamHotels")
        world.put(hotel.with_belief("area", Marginal.from_mapping(AREA, {"north": 0.8, NONE_VALUE: 0.2})))
        assert dump_world(world) == dump_world(world.copy())
        assert "  area: **NONE**:0.2000 north:0.8000" in dump_world(world).splitlines()


def test_random_marginals_stay_normalised():
    rng = np.random.default_rng(3)
    for _ in range(100):
        probs = rng.dirichlet(np.ones(len(AREA)))
        marginal = Marginal(AREA, probs)
        assert marginal.total == pytest.approx(1.0, abs=1e-9)
