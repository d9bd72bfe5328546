"""Parser and renderer for the semantic act grammar.

Grammar::

    act     := ACTTYPE "(" [ item ( "," item )* ] ")"
    item    := qslot                      # request(E#slot)
             | qslot "=" STRING           # literal ("dontcare" is Dontcare)
             | qslot "!=" STRING          # negated literal
             | qslot "=" qslot            # relation reference
    qslot   := IDENT "#" IDENT
    STRING  := '"' ( [^"\\] | '\\' ["\\] )* '"'

Examples::

    inform(CamRestaurants#food="british")
    inform(CamRestaurants#area=CamHotels#area)
    inform(CamHotels#name="none", CamHotels#name!="hobsons house")
    request(CamRestaurants#area)
    bye()
"""

import re

from src.errors import CedmError
from src.ontology.models import DONTCARE

from .models import ActError, ActType, DialogueAct, Dontcare, FillerValue, Literal, Negated, RelationRef, SlotFiller

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")


class ActSyntaxError(CedmError):
    """Raised when text does not follow the act grammar."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position} in {text!r}")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, token: str) -> bool:
        self.skip_ws()
        return self.text.startswith(token, self.pos)

    def expect(self, token: str) -> None:
        if not self.peek(token):
            raise ActSyntaxError(f"expected '{token}'", self.text, self.pos)
        self.pos += len(token)

    def ident(self, what: str) -> str:
        self.skip_ws()
        match = _IDENT.match(self.text, self.pos)
        if not match:
            raise ActSyntaxError(f"expected {what}", self.text, self.pos)
        self.pos = match.end()
        return match.group()

    def string(self) -> str:
        self.skip_ws()
        start = self.pos
        if not self.text.startswith('"', self.pos):
            raise ActSyntaxError("expected quoted value", self.text, self.pos)
        self.pos += 1
        chars = []
        while self.pos < len(self.text):
            char = self.text[self.pos]
            if char == "\\":
                if self.pos + 1 >= len(self.text) or self.text[self.pos + 1] not in '"\\':
                    raise ActSyntaxError("invalid escape", self.text, self.pos)
                chars.append(self.text[self.pos + 1])
                self.pos += 2
                continue
            if char == '"':
                self.pos += 1
                return "".join(chars)
            chars.append(char)
            self.pos += 1
        raise ActSyntaxError("unterminated string", self.text, start)

    def qslot(self) -> tuple[str, str]:
        entity = self.ident("entity id")
        self.expect("#")
        slot = self.ident("slot name")
        return entity, slot

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _parse_item(scanner: _Scanner) -> SlotFiller:
    entity, slot = scanner.qslot()
    value: FillerValue | None = None
    if scanner.peek("!="):
        scanner.expect("!=")
        value = Negated(scanner.string())
    elif scanner.peek("="):
        scanner.expect("=")
        if scanner.peek('"'):
            text = scanner.string()
            value = Dontcare() if text == DONTCARE else Literal(text)
        else:
            value = RelationRef(*scanner.qslot())
    return SlotFiller(entity, slot, value)


def parse_act(text: str) -> DialogueAct:
    """
    Parse one act in the documented grammar.

    Raises:
        ActSyntaxError: With the character position of the first problem
    """
    scanner = _Scanner(text)
    type_pos = scanner.pos
    name = scanner.ident("act type")
    try:
        act_type = ActType(name)
    except ValueError:
        raise ActSyntaxError(f"unknown act type '{name}'", text, type_pos) from None
    scanner.expect("(")
    fillers = []
    if not scanner.peek(")"):
        fillers.append(_parse_item(scanner))
        while scanner.peek(","):
            scanner.expect(",")
            fillers.append(_parse_item(scanner))
    scanner.expect(")")
    if not scanner.at_end():
        raise ActSyntaxError("trailing characters", text, scanner.pos)
    try:
        return DialogueAct(act_type, tuple(fillers))
    except ActError as e:
        raise ActSyntaxError(str(e), text, type_pos) from e


def _quote(value: str) -> str:
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def render_filler(filler: SlotFiller) -> str:
    head = f"{filler.entity}#{filler.slot}"
    value = filler.value
    if value is None:
        return head
    if isinstance(value, RelationRef):
        return f"{head}={value.entity}#{value.slot}"
    if isinstance(value, Negated):
        return f"{head}!={_quote(value.value)}"
    if isinstance(value, Dontcare):
        return f"{head}={_quote(DONTCARE)}"
    return f"{head}={_quote(value.value)}"


def render_act(act: DialogueAct) -> str:
    """Render an act; ``parse_act(render_act(a)) == a``."""
    return f"{act.act_type.value}({', '.join(render_filler(f) for f in act.fillers)})"
