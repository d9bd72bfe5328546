"""Policy construction by kind and versioned JSON checkpoints."""

import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Optional

from loguru import logger

from .base import DialoguePolicy
from .errors import CheckpointError, PolicyError
from .feudal import FeudalPolicyStack, LearnedPolicy
from .handcrafted import HandcraftedPolicy
from .learners import LearnerConfig
from .mddm import MddmPolicy

FORMAT = "cedm-policy"
VERSION = 1

POLICY_KINDS: dict[str, type[DialoguePolicy]] = {
    FeudalPolicyStack.kind: FeudalPolicyStack,
    MddmPolicy.kind: MddmPolicy,
    HandcraftedPolicy.kind: HandcraftedPolicy,
}


def make_policy(kind: str, learner: Optional[LearnerConfig] = None) -> DialoguePolicy:
    try:
        cls = POLICY_KINDS[kind]
    except KeyError:
        raise CheckpointError(f"unknown policy kind '{kind}' (known: {', '.join(sorted(POLICY_KINDS))})") from None
    if issubclass(cls, LearnedPolicy):
        return cls(learner)
    return cls()


def policy_from_state(state: Mapping[str, Any]) -> DialoguePolicy:
    kind = state.get("kind")
    cls = POLICY_KINDS.get(kind)
    if cls is None:
        raise CheckpointError(f"unknown policy kind {kind!r}")
    if issubclass(cls, LearnedPolicy):
        return cls.from_state(dict(state))
    return cls()


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def save_policies(
    path: Path, policies: Mapping[str, DialoguePolicy], meta: Optional[Mapping[str, Any]] = None
) -> Path:
    """
    Write the policies of one world, keyed by object id.

    Raises:
        CheckpointError: If the file cannot be written
    """
    payload = {
        "format": FORMAT,
        "version": VERSION,
        "meta": dict(meta or {}),
        "policies": {object_id: policy.to_state() for object_id, policy in policies.items()},
    }
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(canonical_json(payload), encoding="utf-8")
    except OSError as e:
        raise CheckpointError(f"cannot write checkpoint {path}: {e}") from e
    logger.info(f"Saved {len(policies)} policies to {path}")
    return path


def load_checkpoint(path: Path) -> dict[str, Any]:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    if not isinstance(payload, dict) or payload.get("format") != FORMAT:
        raise CheckpointError(f"{path} is not a policy checkpoint")
    if payload.get("version") != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {payload.get('version')!r}")
    return payload


def load_policies(path: Path) -> dict[str, DialoguePolicy]:
    """
    Read policies written by ``save_policies``.

    Raises:
        CheckpointError: On a missing file, a foreign format or a version mismatch
    """
    payload = load_checkpoint(path)
    try:
        policies = {object_id: policy_from_state(state) for object_id, state in payload["policies"].items()}
    except (KeyError, TypeError, ValueError, PolicyError) as e:
        raise CheckpointError(f"{path}: malformed policy state ({e})") from e
    logger.info(f"Loaded {len(policies)} policies from {path}")
    return policies
