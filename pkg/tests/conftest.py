import os
import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from fairltl.kripke import parse_model
from fairltl.ltl import LassoWord

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

THREE_STATE_TEXT = """\
# three states, four transitions
states: s0 s1 s2
init: s0
trans: s0->s0 s0->s1 s1->s2 s2->s0
label: s0: a
label: s1:
label: s2: a c
"""


@pytest.fixture
def three_state():
    return parse_model(THREE_STATE_TEXT)


@pytest.fixture
def rng():
    return random.Random(12345)


seeds = st.integers(min_value=0, max_value=2**32 - 1)

letters = st.frozensets(st.sampled_from("abc"))


@st.composite
def lassos(draw, max_prefix=4, max_loop=5, min_prefix=0):
    prefix = draw(st.lists(letters, min_size=min_prefix, max_size=max_prefix))
    loop = draw(st.lists(letters, min_size=1, max_size=max_loop))
    return LassoWord(tuple(prefix), tuple(loop))


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
