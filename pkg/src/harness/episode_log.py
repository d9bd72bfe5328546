"""Per-dialogue transcript with rewards, rendered as line-oriented text."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from src.acts.grammar import render_act
from src.acts.models import DialogueAct, Observation

SYSTEM = "SYS"
USER = "USR"


@dataclass(frozen=True)
class TurnRecord:
    """One half-turn of the dialogue."""

    index: int
    role: str
    act: DialogueAct
    object_id: Optional[str] = None
    actions: tuple[str, ...] = ()
    reward: float = 0.0
    observation: Optional[Observation] = None
    belief: Optional[str] = None


@dataclass
class EpisodeLog:
    episode: int
    phase: str
    seed: int
    config_hash: str
    order: tuple[str, ...] = ()
    goal: str = ""
    turns: list[TurnRecord] = field(default_factory=list)
    success: dict[str, bool] = field(default_factory=dict)
    turn_counts: dict[str, int] = field(default_factory=dict)
    returns: dict[str, float] = field(default_factory=dict)

    def add(self, record: TurnRecord) -> None:
        self.turns.append(record)

    def system_acts(self) -> list[DialogueAct]:
        return [t.act for t in self.turns if t.role == SYSTEM]

    def user_acts(self) -> list[DialogueAct]:
        return [t.act for t in self.turns if t.role == USER]

    @property
    def relation_acts(self) -> int:
        return sum(1 for t in self.turns if t.role == SYSTEM and any(a.startswith("confirm_rel_") for a in t.actions))

    @property
    def has_relation_act(self) -> bool:
        return self.relation_acts > 0

    def position(self, object_id: str) -> int:
        """1-based position of the object in the user's goal order."""
        return self.order.index(object_id) + 1

    def render(self, beliefs: bool = True) -> str:
        lines = [f"# episode {self.episode} phase={self.phase} seed={self.seed} config={self.config_hash}"]
        if self.goal:
            lines += [f"# {line}" for line in self.goal.splitlines()]
        for turn in self.turns:
            tag = f"T{turn.index:02d} {turn.role}"
            if turn.role == SYSTEM:
                detail = f" [{' > '.join(turn.actions)}]" if turn.actions else ""
                reward = f" r={turn.reward:g}" if turn.reward else ""
                lines.append(f"{tag} {render_act(turn.act)}{detail}{reward}")
                continue
            lines.append(f"{tag} {render_act(turn.act)}")
            if turn.observation is not None:
                for hypothesis in turn.observation.hypotheses:
                    lines.append(f"T{turn.index:02d} OBS {hypothesis.confidence:.4f} {render_act(hypothesis.act)}")
            if beliefs and turn.belief:
                lines += [f"T{turn.index:02d} BEL {line}" for line in turn.belief.splitlines()]
        for object_id in self.order:
            lines.append(
                f"result {object_id} position={self.position(object_id)} "
                f"success={int(self.success.get(object_id, False))} "
                f"turns={self.turn_counts.get(object_id, 0)} return={self.returns.get(object_id, 0.0):g}"
            )
        return "\n".join(lines) + "\n"


def write_logs(path: Path, logs: Iterable[EpisodeLog], beliefs: bool = True) -> Path:
    """Write logs to one text file, episodes separated by a blank line."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for log in logs:
            f.write(log.render(beliefs))
            f.write("\n")
    return path
