from dataclasses import replace

import numpy as np
import pytest

from src.acts.grammar import parse_act
from src.acts.models import Observation
from src.entities.marginal import RELATION_DOMAIN, Marginal
from src.entities.world import apply_offer
from src.ontology.models import EQUALS, NONE_VALUE
from src.tracking import (
    DialogueStateTracker,
    TrackingError,
    apply_rejection_discount,
    compute_focus_state,
    focus_rule_update,
    merge_slot,
    track_object,
    weighted_relation_belief,
)

TOY = (NONE_VALUE, "v1", "v2")
REL = "CamHotels-CamRestaurants"


def toy(none, v1, v2):
    return Marginal(TOY, [none, v1, v2])


def relation_belief(equals):
    return Marginal.from_mapping(RELATION_DOMAIN, {EQUALS: equals, NONE_VALUE: 1.0 - equals})


def set_relation(world, equals, attribute="area2area"):
    rel = world.relation(REL)
    world.put(rel.with_belief(attribute, relation_belief(equals)))


def set_belief(world, object_id, slot, mapping):
    obj = world.object(object_id)
    world.put(obj.with_belief(slot, Marginal.from_mapping(obj.belief(slot).domain, mapping)))


class TestRules:
    def test_focus_rule_from_fresh(self, world):
        prior = world.object("CamHotels").belief("area")
        posterior = focus_rule_update(prior, {"north": 0.8})
        assert posterior["north"] == pytest.approx(0.8)
        assert posterior.none == pytest.approx(0.2)

    def test_focus_rule_full_confidence_replaces(self, world):
        prior = Marginal.point(world.object("CamHotels").belief("area").domain, "west")
        assert focus_rule_update(prior, {"north": 1.0})["north"] == pytest.approx(1.0)

    def test_no_evidence_keeps_prior(self):
        prior = toy(0.3, 0.7, 0.0)
        assert focus_rule_update(prior, {}) is prior

    def test_evidence_over_one(self, world):
        prior = world.object("CamHotels").belief("area")
        with pytest.raises(TrackingError):
            focus_rule_update(prior, {"north": 0.7, "west": 0.5})

    def test_unknown_value(self):
        with pytest.raises(TrackingError):
            focus_rule_update(toy(1.0, 0.0, 0.0), {"v3": 0.5})

    def test_rejection_moves_mass_to_none(self):
        domain = (NONE_VALUE, "west", "north")
        prior = Marginal.from_mapping(domain, {"west": 0.6, "north": 0.3, NONE_VALUE: 0.1})
        posterior = apply_rejection_discount(prior, "west", 0.5)
        assert posterior["west"] == pytest.approx(0.3)
        assert posterior["north"] == pytest.approx(0.3)
        assert posterior.none == pytest.approx(0.4)

    def test_rejection_bounds(self):
        with pytest.raises(TrackingError):
            apply_rejection_discount(toy(0.5, 0.5, 0.0), "v1", 1.5)
        with pytest.raises(TrackingError):
            apply_rejection_discount(toy(0.5, 0.5, 0.0), NONE_VALUE, 0.5)


class TestMerging:
    def test_weighted_relation_belief(self):
        tilde = weighted_relation_belief(relation_belief(0.9), toy(0.2, 0.0, 0.8))
        assert tilde.probs.tolist() == pytest.approx([0.28, 0.0, 0.72])

    def test_context_becomes_point_mass(self):
        tilde = weighted_relation_belief(relation_belief(1.0), toy(1.0, 0.0, 0.0), "v1")
        assert tilde == toy(0.0, 1.0, 0.0)

    def test_merge_worked_example(self):
        own = toy(0.3, 0.7, 0.0)
        tilde = weighted_relation_belief(relation_belief(0.9), toy(0.2, 0.0, 0.8))
        merged, conflict, weights = merge_slot(own, [(REL, tilde)])
        expected = [0.4116 / 1.42, 0.49 / 1.42, 0.5184 / 1.42]
        assert merged.probs.tolist() == pytest.approx(expected, abs=1e-9)
        assert conflict
        assert weights == pytest.approx({"self": 0.7, REL: 0.72})

    def test_all_weights_zero_is_fresh(self):
        fresh = toy(1.0, 0.0, 0.0)
        merged, conflict, _ = merge_slot(fresh, [(REL, fresh)])
        assert merged.is_fresh()
        assert not conflict

    def test_silent_relations_keep_own_belief(self):
        own = toy(0.3, 0.7, 0.0)
        merged, conflict, _ = merge_slot(own, [(REL, toy(1.0, 0.0, 0.0))])
        assert merged == own
        assert not conflict

    def test_agreeing_beliefs_do_not_conflict(self):
        _, conflict, _ = merge_slot(toy(0.0, 0.9, 0.1), [(REL, toy(0.2, 0.8, 0.0))])
        assert not conflict

    def test_weak_beliefs_do_not_conflict(self):
        _, conflict, _ = merge_slot(toy(0.5, 0.5, 0.0), [(REL, toy(0.0, 0.0, 1.0))])
        assert not conflict

    def test_offer_flows_through_relation(self, world, kb):
        apply_offer(world, "CamHotels", kb.record_by_name("CamHotels", "limehouse"))
        set_relation(world, 1.0)
        state = compute_focus_state(world, "CamRestaurants")
        assert state.top_value("area") == "north"
        assert state.top_value("food") is None
        assert not state.conflict

    def test_conflict_with_offer(self, world, kb):
        apply_offer(world, "CamHotels", kb.record_by_name("CamHotels", "limehouse"))
        set_relation(world, 1.0)
        set_belief(world, "CamRestaurants", "area", {"west": 1.0})
        state = compute_focus_state(world, "CamRestaurants")
        assert state.conflicts["area"]
        assert state.merged["area"]["west"] == pytest.approx(0.5)
        assert state.merged["area"]["north"] == pytest.approx(0.5)

    def test_relations_disabled(self, world, kb):
        apply_offer(world, "CamHotels", kb.record_by_name("CamHotels", "limehouse"))
        set_relation(world, 1.0)
        state = compute_focus_state(world, "CamRestaurants", relations_enabled=False)
        assert state.merged["area"].is_fresh()


class TestTrackObject:
    def test_nbest_evidence_is_summed(self, world):
        obs = Observation(
            (
                (parse_act('inform(CamHotels#area="north")'), 0.6),
                (parse_act('inform(CamHotels#area="west")'), 0.25),
            )
        )
        hotel = track_object(world.object("CamHotels"), None, obs)
        area = hotel.belief("area")
        assert area["north"] == pytest.approx(0.6)
        assert area["west"] == pytest.approx(0.25)
        assert area.none == pytest.approx(0.15)

    def test_negate_rejects_confirmed_value(self, world):
        set_belief(world, "CamHotels", "area", {"north": 0.8, NONE_VALUE: 0.2})
        system = parse_act('confirm(CamHotels#area="north")')
        hotel = track_object(
            world.object("CamHotels"), system, Observation.certain(parse_act('negate(CamHotels#area="west")'))
        )
        assert hotel.belief("area")["west"] == pytest.approx(1.0)
        assert hotel.user_negated

    def test_affirm_supports_confirmed_value(self, world):
        system = parse_act('confirm(CamHotels#stars="2")')
        hotel = track_object(world.object("CamHotels"), system, Observation.certain(parse_act("affirm()")))
        assert hotel.belief("stars")["2"] == pytest.approx(1.0)

    def test_request_becomes_pending(self, world):
        hotel = track_object(
            world.object("CamHotels"), None, Observation.certain(parse_act("request(CamHotels#price)"))
        )
        assert hotel.pending_requests == {"price"}
        assert hotel.belief("area").is_fresh()

    def test_reqalts_flag_follows_last_user_act(self, world):
        hotel = track_object(world.object("CamHotels"), None, Observation.certain(parse_act("reqalts()")))
        assert hotel.alternatives_requested
        hotel = track_object(hotel, None, Observation.certain(parse_act("request(CamHotels#phone)")))
        assert not hotel.alternatives_requested

    def test_foreign_hypothesis(self, world):
        with pytest.raises(TrackingError):
            track_object(
                world.object("CamHotels"), None, Observation.certain(parse_act('inform(CamRestaurants#food="thai")'))
            )


class TestDialogueStateTracker:
    def test_greeting_and_closing(self, world):
        tracker = DialogueStateTracker(world)
        tracker.update(None, Observation.certain(parse_act("hello()")))
        assert world.world_belief.greeted
        tracker.update(None, Observation.certain(parse_act("bye()")))
        assert world.world_belief.closing

    def test_routes_to_addressed_object_and_sets_focus(self, world):
        tracker = DialogueStateTracker(world)
        tracker.update(None, Observation.certain(parse_act('inform(CamRestaurants#food="thai")')))
        assert world.object("CamRestaurants").belief("food")["thai"] == pytest.approx(1.0)
        assert world.object("CamHotels").belief("kind").is_fresh()
        assert world.focus == {"CamRestaurants"}

    def test_relation_inform(self, world):
        tracker = DialogueStateTracker(world)
        obs = Observation(((parse_act("inform(CamRestaurants#area=CamHotels#area)"), 0.9),))
        tracker.update(None, obs)
        rel = world.relation(REL)
        assert rel.user_goal["area2area"][EQUALS] == pytest.approx(0.9)
        assert rel.user_goal["area2area"].none == pytest.approx(0.1)
        assert rel.active
        assert world.object("CamRestaurants").belief("area").is_fresh()
        assert world.focus == {"CamRestaurants"}

    def test_relation_inform_ignored_without_relations(self, world):
        tracker = DialogueStateTracker(world, relations_enabled=False)
        tracker.update(None, Observation.certain(parse_act("inform(CamRestaurants#area=CamHotels#area)")))
        rel = world.relation(REL)
        assert rel.user_goal["area2area"].is_fresh()
        assert not rel.active

    def test_relation_confirm_affirm_then_negate(self, world):
        tracker = DialogueStateTracker(world)
        system = parse_act("confirm(CamRestaurants#area=CamHotels#area)")
        tracker.record_system_act(system)
        rel = world.relation(REL)
        assert rel.confirmed == {"area2area"}
        assert rel.active

        tracker.update(system, Observation.certain(parse_act("affirm()")))
        assert world.relation(REL).equals("area2area") == pytest.approx(1.0)

        tracker.update(system, Observation.certain(parse_act("negate()")))
        assert world.relation(REL).user_goal["area2area"].none == pytest.approx(1.0)

    def test_bare_affirm_goes_to_focus(self, world):
        tracker = DialogueStateTracker(world)
        world.focus = frozenset({"CamHotels"})
        system = parse_act('confirm(CamHotels#kind="guesthouse")')
        tracker.update(system, Observation.certain(parse_act("affirm()")))
        assert world.object("CamHotels").belief("kind")["guesthouse"] == pytest.approx(1.0)

    def test_record_request_and_offer(self, world, kb):
        tracker = DialogueStateTracker(world)
        tracker.record_system_act(parse_act("request(CamHotels#area)"))
        assert world.object("CamHotels").history.requested == {"area"}

        hotel = world.object("CamHotels")
        world.put(replace(hotel, pending_requests=frozenset({"phone"})))
        apply_offer(world, "CamHotels", kb.record_by_name("CamHotels", "limehouse"))
        tracker.record_system_act(parse_act('inform(CamHotels#name="limehouse", CamHotels#phone="01223 300552")'))
        hotel = world.object("CamHotels")
        assert "phone" in hotel.history.informed
        assert not hotel.pending_requests

    def test_inform_about_other_venue_is_not_recorded(self, world, kb):
        tracker = DialogueStateTracker(world)
        apply_offer(world, "CamHotels", kb.record_by_name("CamHotels", "limehouse"))
        tracker.record_system_act(parse_act('inform(CamHotels#name="finches", CamHotels#area="west")'))
        assert not world.object("CamHotels").history.informed

    def test_system_hello(self, world):
        tracker = DialogueStateTracker(world)
        tracker.record_system_act(parse_act("hello()"))
        assert world.world_belief.system_greeted

    def test_focus_state_needs_focus(self, world):
        with pytest.raises(TrackingError):
            DialogueStateTracker(world).focus_state()


def random_act(rng, world):
    object_id = world.object_ids[rng.integers(len(world.object_ids))]
    type_def = world.object(object_id).type_def
    slot = type_def.informable_slots[rng.integers(len(type_def.informable_slots))]
    values = type_def.values(slot)
    value = values[rng.integers(len(values))]
    other = next(o for o in world.object_ids if o != object_id)
    shared = "area" if rng.random() < 0.5 else "pricerange"
    return str(
        rng.choice(
            [
                f'inform({object_id}#{slot}="{value}")',
                f'negate({object_id}#{slot}="{value}")',
                f'inform({object_id}#{slot}="dontcare")',
                f"inform({object_id}#{shared}={other}#{shared})",
                f"request({object_id}#{slot})",
                "affirm()",
                "negate()",
                "reqalts()",
            ]
        )
    )


def random_observation(rng, world):
    size = int(rng.integers(1, 4))
    confidences = sorted(rng.dirichlet(np.ones(size + 1))[:size], reverse=True)
    return Observation(tuple((parse_act(random_act(rng, world)), c) for c in confidences))


@pytest.mark.parametrize("seed", range(20))
def test_beliefs_stay_normalised_under_random_turns(seed, world):
    rng = np.random.default_rng(seed)
    tracker = DialogueStateTracker(world)
    system_acts = [
        None,
        parse_act("confirm(CamHotels#area=CamRestaurants#area)"),
        parse_act('confirm(CamHotels#area="north")'),
        parse_act('inform(CamRestaurants#name="none", CamRestaurants#area="west")'),
    ]
    for _ in range(25):
        system_act = system_acts[rng.integers(len(system_acts))]
        if system_act is not None:
            tracker.record_system_act(system_act)
        tracker.update(system_act, random_observation(rng, world))
        for entity_id in world.entity_ids:
            for marginal in world.entity(entity_id).user_goal.values():
                assert marginal.total == pytest.approx(1.0, abs=1e-9)
                assert marginal.probs.min() >= 0.0
        for object_id in world.object_ids:
            for marginal in compute_focus_state(world, object_id).merged.values():
                assert marginal.total == pytest.approx(1.0, abs=1e-9)
