import pytest

from src.harness.interactive import HELP_TEXT, InteractiveSession, run_repl
from src.harness.training import new_policies


@pytest.fixture
def session(make_config):
    config = make_config()
    return InteractiveSession(config, new_policies(config))


def scripted(*lines):
    """A ``read`` callable that replays ``lines`` and then signals end of input."""
    pending = list(lines)

    def read(prompt):
        if not pending:
            raise EOFError
        return pending.pop(0)

    return read


class TestInteractiveSession:
    def test_start_greets(self, session):
        assert session.start() == "hello()"
        assert session.world.world_belief.system_greeted

    def test_inform_is_tracked(self, session):
        session.start()
        reply = session.handle('inform(CamHotels#kind="guesthouse")')
        assert reply.startswith("request(CamHotels#")
        assert reply != "request(CamHotels#kind)"
        assert session.world.object("CamHotels").belief("kind")["guesthouse"] == pytest.approx(1.0)
        assert session.world.focus == {"CamHotels"}

    def test_syntax_error(self, session):
        session.start()
        assert session.handle('inform(CamHotels#kind="guesthouse"').startswith("error: ")
        assert not session.closed

    def test_unknown_entity(self, session):
        session.start()
        assert session.handle('inform(CamTaxis#area="north")').startswith("error: ")

    def test_undeclared_value_leaves_state_untouched(self, session):
        session.start()
        before = session.state()
        assert session.handle('inform(CamHotels#kind="castle")').startswith("error: ")
        assert session.state() == before
        assert session.handle('inform(CamHotels#kind="guesthouse")').startswith("request(")

    def test_bye_closes(self, session):
        session.start()
        assert session.handle("bye()") == "bye()"
        assert session.closed
        assert session.handle('inform(CamHotels#kind="guesthouse")') == "The dialogue is over. Start a new one."


class TestRepl:
    def test_commands(self, session):
        out = []
        run_repl(session, scripted("", ":help", ":state", 'inform(CamHotels#kind="guesthouse")', ":quit"), out.append)
        assert out[0] == HELP_TEXT
        assert out[1] == "system: hello()"
        assert out[2] == HELP_TEXT
        assert out[3].startswith("world greeted=")
        assert out[4].startswith("system: request(CamHotels#")
        assert len(out) == 5

    def test_end_of_input(self, session):
        out = []
        run_repl(session, scripted(), out.append)
        assert out == [HELP_TEXT, "system: hello()"]

    def test_stops_after_bye(self, session):
        out = []
        run_repl(session, scripted("bye()", ":state"), out.append)
        assert out[-1] == "system: bye()"
