import pytest
from hypothesis import given
from hypothesis import strategies as st

from fbapomcp.common.exceptions import InvalidArgumentError
from fbapomcp.domains.domain_model import TigerActionEnum
from fbapomcp.pomdp.episode_service import discounted_return, run_episode


class ListenThenOpen:
    def __init__(self, listens: int):
        self.listens = listens
        self.calls = []

    def begin_episode(self):
        self.calls.append("begin")
        self.taken = 0

    def act(self, steps_left):
        self.calls.append(steps_left)
        self.taken += 1
        return TigerActionEnum.LISTEN if self.taken <= self.listens else TigerActionEnum.OPEN_LEFT

    def observe(self, action, observation):
        return -0.5

    def end_episode(self):
        self.calls.append("end")


@given(
    st.lists(st.floats(min_value=-100, max_value=100), max_size=40),
    st.floats(min_value=0.01, max_value=0.99),
)
def test_discounted_return_is_bounded(rewards, discount):
    bound = max((abs(r) for r in rewards), default=0.0) / (1 - discount)
    assert abs(discounted_return(rewards, discount)) <= bound + 1e-9


def test_discounted_return_arithmetic():
    assert discounted_return([1.0, 1.0, 1.0], 0.5) == pytest.approx(1.75)
    assert discounted_return([], 0.9) == 0.0


@pytest.mark.parametrize("discount", [0.0, 1.0, 1.5])
def test_discount_must_be_open_unit_interval(discount):
    with pytest.raises(InvalidArgumentError):
        discounted_return([1.0], discount)


def test_episode_stops_at_terminal_step(small_tiger, rng):
    domain, _ = small_tiger
    agent = ListenThenOpen(listens=2)
    episode_return, history = run_episode(domain, agent, 10, rng)
    assert history.actions == [2, 2, 0]
    assert agent.calls == ["begin", 10, 9, 8, "end"]
    assert history.step_log_likelihoods == [-0.5, -0.5, -0.5]
    assert episode_return in (
        pytest.approx(-1 - 0.95 + 0.95**2 * 10),
        pytest.approx(-1 - 0.95 - 0.95**2 * 100),
    )


def test_episode_stops_at_horizon(small_tiger, rng):
    domain, _ = small_tiger
    _, history = run_episode(domain, ListenThenOpen(listens=100), 5, rng)
    assert len(history) == 5
    assert len(history.observations) == 5


def test_horizon_must_be_positive(small_tiger, rng):
    domain, _ = small_tiger
    with pytest.raises(InvalidArgumentError):
        run_episode(domain, ListenThenOpen(1), 0, rng)


def test_invalid_action_is_rejected(small_tiger, rng):
    domain, _ = small_tiger

    class Broken(ListenThenOpen):
        def act(self, steps_left):
            return 7

    with pytest.raises(InvalidArgumentError):
        run_episode(domain, Broken(0), 3, rng)
