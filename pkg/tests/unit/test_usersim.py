import copy

import numpy as np
import pytest
from pydantic import ValidationError

from src.acts.addressing import validate_act
from src.acts.grammar import parse_act, render_act
from src.acts.models import ActType, Literal, RelationRef
from src.ontology.models import DONTCARE, KnowledgeBase
from src.usersim import (
    ENVIRONMENTS,
    ErrorModelConfig,
    ObjectGoal,
    RelationGoal,
    SimulationError,
    UserConfig,
    UserGoal,
    UserSimulator,
    apply_error_model,
    confuse,
    evaluate_success,
    final_offers,
    sample_goal,
)

REL = "CamHotels-CamRestaurants"
HELLO = parse_act("hello()")
LIMEHOUSE_WITH_PHONE = parse_act('inform(CamHotels#name="limehouse", CamHotels#phone="01223 300552")')
SAINT_JOHNS = parse_act('inform(CamRestaurants#name="saint johns chop house", CamRestaurants#food="british")')


@pytest.fixture
def goal(kb):
    """Guesthouse in the north with a phone request, then a british restaurant at the same price range."""
    return UserGoal(
        objects={
            "CamHotels": ObjectGoal(
                "CamHotels",
                "CamHotels",
                {"kind": "guesthouse", "area": "north", "pricerange": "moderate", "stars": DONTCARE},
                ("phone",),
                kb.record_by_name("CamHotels", "limehouse"),
            ),
            "CamRestaurants": ObjectGoal(
                "CamRestaurants",
                "CamRestaurants",
                {"food": "british", "pricerange": "moderate", "area": "west"},
                (),
                kb.record_by_name("CamRestaurants", "saint johns chop house"),
            ),
        },
        relations={REL: RelationGoal(REL, ("CamHotels", "CamRestaurants"), ("pricerange2pricerange",))},
        order=("CamHotels", "CamRestaurants"),
    )


def simulator(goal, world, kb, r=0.0, **config):
    return UserSimulator(goal, world, kb, np.random.default_rng(0), r, UserConfig(**{"reqalts": 0.0, **config}))


class TestSampleGoal:
    def test_goals_are_satisfiable_and_consistent(self, world, kb):
        for seed in range(50):
            goal = sample_goal(np.random.default_rng(seed), kb, world)
            assert goal.order == world.object_ids
            for object_id, object_goal in goal.objects.items():
                target = object_goal.target
                assert kb.record_by_name(object_goal.type_name, target["name"]) == target
                for slot, value in object_goal.literal_constraints.items():
                    assert target[slot] == value
                assert len(object_goal.requests) <= 2
            rel_goal = goal.relations[REL]
            assert rel_goal.attributes
            rel = world.relation(REL)
            hotel, restaurant = (goal.objects[i] for i in rel.endpoints)
            for name in rel_goal.attributes:
                attr = rel.attribute(name)
                assert hotel.target[attr.slot_a] == restaurant.target[attr.slot_b]
                assert hotel.constraints[attr.slot_a] != DONTCARE
                assert goal.is_valid(world, "CamHotels", goal.related_slots(world, "CamHotels", attr.slot_a)[0])

    def test_alternating_order(self, world, kb):
        orders = {sample_goal(np.random.default_rng(seed), kb, world, "alternating").order for seed in range(20)}
        assert orders == {("CamHotels", "CamRestaurants"), ("CamRestaurants", "CamHotels")}

    def test_deterministic(self, world, kb):
        a = sample_goal(np.random.default_rng(9), kb, world)
        b = sample_goal(np.random.default_rng(9), kb, world)
        assert a.describe() == b.describe()

    def test_unsatisfiable(self, world, types):
        kb = KnowledgeBase(
            types,
            {
                "CamHotels": [
                    {"name": "h", "kind": "hotel", "area": "north", "pricerange": "cheap", "stars": "2"}
                ],
                "CamRestaurants": [
                    {"name": "r", "food": "thai", "area": "south", "pricerange": "expensive"}
                ],
            },
        )
        with pytest.raises(SimulationError):
            sample_goal(np.random.default_rng(0), kb, world, retries=5)


class TestUserSimulator:
    def test_opening_names_the_type(self, goal, world, kb):
        user = simulator(goal, world, kb)
        act = user.respond(HELLO)
        assert act.act_type == ActType.INFORM
        assert (act.fillers[0].entity, act.fillers[0].slot, act.fillers[0].literal) == (
            "CamHotels",
            "type",
            "placetostay",
        )
        for filler in act.fillers[1:]:
            assert filler.literal == goal.objects["CamHotels"].constraints[filler.slot]

    def test_answers_request(self, goal, world, kb):
        user = simulator(goal, world, kb)
        user.respond(HELLO)
        assert render_act(user.respond(parse_act("request(CamHotels#area)"))) == 'inform(CamHotels#area="north")'

    def test_confirms(self, goal, world, kb):
        user = simulator(goal, world, kb)
        user.respond(HELLO)
        assert render_act(user.respond(parse_act('confirm(CamHotels#area="north")'))) == "affirm()"
        assert render_act(user.respond(parse_act('confirm(CamHotels#area="south")'))) == (
            'negate(CamHotels#area="north")'
        )

    def test_corrects_wrong_offer(self, goal, world, kb):
        user = simulator(goal, world, kb)
        user.respond(HELLO)
        reply = user.respond(parse_act('inform(CamHotels#name="hobsons house", CamHotels#area="west")'))
        assert render_act(reply) == 'negate(CamHotels#area="north")'

    def test_requests_goal_slots_then_moves_on(self, goal, world, kb):
        user = simulator(goal, world, kb)
        user.respond(HELLO)
        reply = user.respond(parse_act('inform(CamHotels#name="limehouse", CamHotels#area="north")'))
        assert render_act(reply) == "request(CamHotels#phone)"
        reply = user.respond(LIMEHOUSE_WITH_PHONE)
        assert reply.fillers[0].entity == "CamRestaurants"
        assert reply.fillers[0].literal == "restaurant"
        assert user.current == "CamRestaurants"

    def test_refers_to_earlier_object(self, goal, world, kb):
        user = simulator(goal, world, kb, r=1.0)
        user.respond(HELLO)
        opening = user.respond(LIMEHOUSE_WITH_PHONE)
        for filler in opening.fillers:
            if filler.slot == "pricerange":
                assert filler.value == RelationRef("CamHotels", "pricerange")
            if filler.slot in ("food", "area"):
                assert isinstance(filler.value, Literal)
        reply = user.respond(parse_act("request(CamRestaurants#pricerange)"))
        assert render_act(reply) == "inform(CamRestaurants#pricerange=CamHotels#pricerange)"

    def test_relation_confirms(self, goal, world, kb):
        user = simulator(goal, world, kb)
        user.respond(HELLO)
        user.respond(LIMEHOUSE_WITH_PHONE)
        reply = user.respond(parse_act("confirm(CamHotels#pricerange=CamRestaurants#pricerange)"))
        assert render_act(reply) == "affirm()"
        reply = user.respond(parse_act("confirm(CamHotels#area=CamRestaurants#area)"))
        assert render_act(reply) == 'negate(CamRestaurants#area="west")'

    def test_no_venue_with_wrong_constraint(self, goal, world, kb):
        user = simulator(goal, world, kb)
        user.respond(HELLO)
        user.respond(LIMEHOUSE_WITH_PHONE)
        reply = user.respond(parse_act('inform(CamRestaurants#name="none", CamRestaurants#food="thai")'))
        assert render_act(reply) == 'negate(CamRestaurants#food="british")'

    def test_finishes_after_last_object(self, goal, world, kb):
        user = simulator(goal, world, kb)
        user.respond(HELLO)
        user.respond(LIMEHOUSE_WITH_PHONE)
        assert user.respond(SAINT_JOHNS).act_type == ActType.BYE
        assert user.finished

    def test_patience(self, goal, world, kb):
        user = simulator(goal, world, kb, patience=5)
        user.respond(HELLO)
        request = parse_act("request(CamHotels#area)")
        replies = [user.respond(request) for _ in range(6)]
        assert [r.act_type for r in replies[:4]] == [ActType.INFORM] * 4
        assert replies[5].act_type == ActType.BYE
        assert user.patience_left == 0

    def test_gives_up_on_offers_ignoring_corrections(self, goal, world, kb):
        user = simulator(goal, world, kb, patience=5)
        user.respond(HELLO)
        names = ["hobsons house", "cityroomz", "autumn house", "rosas bed and breakfast", "finches bed and breakfast"]
        replies = [user.respond(parse_act(f'inform(CamHotels#name="{name}")')) for name in names]
        assert [r.act_type for r in replies[:4]] == [ActType.NEGATE] * 4
        assert "area" in user.agendas["CamHotels"].corrected
        assert user.respond(parse_act('inform(CamHotels#name="gonville hotel")')).act_type == ActType.BYE

    def test_new_request_restores_patience(self, goal, world, kb):
        user = simulator(goal, world, kb, patience=3)
        user.respond(HELLO)
        user.respond(parse_act('inform(CamHotels#name="hobsons house")'))
        user.respond(parse_act('inform(CamHotels#name="cityroomz")'))
        assert user.patience_left == 2
        user.agendas["CamHotels"].given.discard("stars")
        assert user.respond(parse_act("request(CamHotels#stars)")).act_type == ActType.INFORM
        assert user.patience_left == 3

    def test_goal_changes_on_no_venue_at_configured_rate(self, goal, world, kb):
        no_venue = parse_act('inform(CamHotels#name="none")')
        changed = 0
        for seed in range(2000):
            user = UserSimulator(copy.deepcopy(goal), world, kb, np.random.default_rng(seed), 0.0, UserConfig())
            user.respond(HELLO)
            reply = user.respond(no_venue)
            changed += bool(user.goal.changes)
            assert reply.act_type == ActType.INFORM
        assert 0.03 < changed / 2000 < 0.07

    def test_reqalts_without_alternatives_changes_goal(self, goal, world, kb):
        user = simulator(goal, world, kb, reqalts=1.0, reqalts_goal_change=1.0)
        user.respond(HELLO)
        assert user.respond(LIMEHOUSE_WITH_PHONE).act_type == ActType.REQALTS
        reply = user.respond(parse_act('inform(CamHotels#name="none", CamHotels#name!="limehouse")'))
        [(object_id, slot, _, value)] = user.goal.changes
        assert object_id == "CamHotels"
        assert render_act(reply) == f'reqalts(CamHotels#{slot}="{value}")'

    def test_reqalts_falls_back_to_accepted_offer(self, goal, world, kb):
        user = simulator(goal, world, kb, reqalts=1.0, reqalts_goal_change=0.0)
        user.respond(HELLO)
        user.respond(LIMEHOUSE_WITH_PHONE)
        reply = user.respond(parse_act('inform(CamHotels#name="none", CamHotels#name!="limehouse")'))
        assert not user.goal.changes
        assert user.current == "CamRestaurants"
        assert reply.fillers[0].entity == "CamRestaurants"

    def test_system_bye_ends(self, goal, world, kb):
        user = simulator(goal, world, kb)
        assert user.respond(parse_act("bye()")).act_type == ActType.BYE
        assert user.finished

    def test_skip_object(self, goal, world, kb):
        user = simulator(goal, world, kb)
        user.respond(HELLO)
        user.skip_object()
        assert user.current == "CamRestaurants"
        user.skip_object()
        assert user.finished


class TestErrorModel:
    act = parse_act('inform(CamHotels#area="north", CamHotels#pricerange="moderate")')

    def test_env1_is_certain(self, world, rng):
        obs = apply_error_model(rng, self.act, ENVIRONMENTS["env1"], world)
        assert obs.top == self.act
        assert obs.total_confidence == 1.0

    def test_env3_nbest(self, world, rng):
        config = ENVIRONMENTS["env3"]
        wrong_top = 0
        for _ in range(2000):
            obs = apply_error_model(rng, self.act, config, world)
            assert 1 <= len(obs) <= 3
            assert obs.total_confidence <= 1.0 + 1e-9
            acts = [h.act for h in obs.hypotheses]
            assert len(set(acts)) == len(acts)
            for hypothesis in obs.hypotheses:
                validate_act(hypothesis.act, world)
            wrong_top += obs.top != self.act
        assert 0.10 < wrong_top / 2000 < 0.20

    def test_wrong_top_loses_true_act_with_one_hypothesis(self, world, rng):
        config = ErrorModelConfig(ser=1.0, nbest=1)
        for _ in range(100):
            obs = apply_error_model(rng, self.act, config, world)
            assert len(obs) == 1
            assert obs.top != self.act

    def test_confusions_stay_in_the_act_space(self, world, rng):
        config = ENVIRONMENTS["env3"]
        for text in ('inform(CamHotels#area="north")', "affirm()", "request(CamHotels#phone)"):
            original = parse_act(text)
            for _ in range(100):
                confused = confuse(rng, original, config, world)
                if confused is None:
                    continue
                assert confused != original
                assert confused.act_type not in (ActType.HELLO, ActType.BYE)

    def test_relation_reference_can_resolve_to_literal(self, world, rng):
        act = parse_act("inform(CamRestaurants#area=CamHotels#area)")
        config = ErrorModelConfig(
            ser=1.0, nbest=1, substitution=1.0, act_confusion=0.0, deletion=0.0, relation_literal=1.0
        )
        obs = apply_error_model(rng, act, config, world, resolve=lambda filler: "north")
        assert render_act(obs.top) == 'inform(CamRestaurants#area="north")'

    def test_confusion_weights_must_be_positive(self):
        with pytest.raises(ValidationError):
            ErrorModelConfig(substitution=0.0, act_confusion=0.0, deletion=0.0)


class TestEvaluateSuccess:
    def test_success(self, goal, world, kb):
        assert evaluate_success(goal, [LIMEHOUSE_WITH_PHONE, SAINT_JOHNS], kb, world) == {
            "CamHotels": True,
            "CamRestaurants": True,
        }

    def test_missing_request(self, goal, world, kb):
        offer = parse_act('inform(CamHotels#name="limehouse", CamHotels#area="north")')
        assert evaluate_success(goal, [offer, SAINT_JOHNS], kb, world)["CamHotels"] is False

    def test_last_offer_counts(self, goal, world, kb):
        acts = [
            LIMEHOUSE_WITH_PHONE,
            parse_act('inform(CamRestaurants#name="saint johns chop house")'),
            parse_act('inform(CamRestaurants#name="graffiti")'),
            parse_act('inform(CamRestaurants#name="none", CamRestaurants#food="french")'),
        ]
        assert final_offers(acts, goal.order) == {"CamHotels": "limehouse", "CamRestaurants": "graffiti"}
        assert evaluate_success(goal, acts, kb, world)["CamRestaurants"] is False

    def test_stale_relation_is_not_enforced(self, goal, world, kb):
        graffiti = kb.record_by_name("CamRestaurants", "graffiti")
        goal.change_constraint("CamRestaurants", "pricerange", "expensive", graffiti)
        assert goal.changes == [("CamRestaurants", "pricerange", "moderate", "expensive")]
        related = goal.related_slots(world, "CamRestaurants", "pricerange")
        assert not goal.is_valid(world, "CamRestaurants", related[0])
        offer = parse_act('inform(CamRestaurants#name="graffiti")')
        assert evaluate_success(goal, [LIMEHOUSE_WITH_PHONE, offer], kb, world) == {
            "CamHotels": True,
            "CamRestaurants": True,
        }

    def test_no_offer(self, goal, world, kb):
        assert evaluate_success(goal, [HELLO], kb, world) == {"CamHotels": False, "CamRestaurants": False}
