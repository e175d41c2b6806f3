"""Agent-based market game producing price-change event series.

N agents each hold s strategy tables keyed on the shared m-bit history of
recent outcomes (1 = price changed). Every step each agent plays its
highest-scoring strategy (ties broken uniformly at random); the price
changes when the number of agents choosing to trade exceeds the offer
size L. Every strategy is then scored +1 or -1 against the realized
outcome and the history shifts.

Determinism: a run consumes its generator in a fixed order: strategy
tables, then the initial history bits, then one (N, s) tie-break block
per step (agents 0..N-1, strategies within agent). step() and run_game()
share that layout, so they produce identical trajectories for a seed.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .events import EventSeries

__all__ = [
    "GameConfig",
    "GameState",
    "SweepResult",
    "init_game",
    "step",
    "run_game",
    "sweep",
    "kl_match",
]

DEFAULT_BURN_IN = 1000


@dataclass
class GameConfig:
    """Simulator parameters.

    Defaults are the reference point used throughout: 10 agents with 7
    strategies over 2-bit histories against an offer of 3. A burn-in is
    discarded before events are recorded, removing dependence on the
    random initial history.
    """

    n_agents: int = 10
    memory: int = 2
    n_strategies: int = 7
    offer_size: int = 3
    n_steps: int = 10000
    seed: int = 0
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        for name in (
            "n_agents",
            "memory",
            "n_strategies",
            "offer_size",
            "n_steps",
            "seed",
            "burn_in",
        ):
            value = getattr(self, name)
            if not float(value).is_integer():
                raise ConfigError(f"{name} must be an integer, got {value!r}")
            setattr(self, name, int(value))
        if self.n_agents < 1:
            raise ConfigError("n_agents must be >= 1")
        if not 1 <= self.memory <= 16:
            raise ConfigError("memory must be between 1 and 16")
        if self.n_strategies < 1:
            raise ConfigError("n_strategies must be >= 1")
        if self.offer_size < 0:
            raise ConfigError("offer_size must be >= 0")
        if self.n_steps < 1:
            raise ConfigError("n_steps must be >= 1")
        if self.burn_in < 0:
            raise ConfigError("burn_in must be >= 0")
        if self.offer_size >= self.n_agents:
            warnings.warn(
                f"offer_size {self.offer_size} >= n_agents {self.n_agents}: "
                "demand can never exceed the offer, the price will never "
                "change",
                RuntimeWarning,
                stacklevel=2,
            )


@dataclass
class GameState:
    """Evolving game state.

    ``tables`` holds every strategy's action (+1 trade, -1 hold) per
    history, shape (n_agents, n_strategies, 2^memory). ``history`` packs
    the last m outcomes as an integer whose bit p is the outcome p+1
    steps ago (LSB = most recent). ``event_log`` records the global step
    indices at which the price changed, burn-in included.
    """

    config: GameConfig
    tables: np.ndarray
    scores: np.ndarray
    history: int
    step: int
    event_log: list
    rng: np.random.Generator

    @property
    def history_bits(self):
        m = self.config.memory
        return [(self.history >> p) & 1 for p in range(m)]


def init_game(config):
    """Draw fresh strategy tables and a random initial history.

    Each table entry is an independent fair coin over {+1, -1}, which is
    uniform over the full table space with repetitions allowed across
    strategies. All scores start at zero.
    """
    rng = np.random.default_rng(config.seed)
    shape = (config.n_agents, config.n_strategies, 2 ** config.memory)
    tables = (rng.integers(0, 2, size=shape, dtype=np.int8) * 2 - 1).astype(
        np.int8
    )
    bits = rng.integers(0, 2, size=config.memory)
    history = 0
    for p in range(config.memory):
        history |= int(bits[p]) << p
    scores = np.zeros((config.n_agents, config.n_strategies), dtype=np.int64)
    return GameState(
        config=config,
        tables=tables,
        scores=scores,
        history=history,
        step=0,
        event_log=[],
        rng=rng,
    )


def step(state):
    """Advance the game one step, in place.

    Each agent plays its highest-scoring strategy with uniform random
    tie-breaking; demand x is the number of +1 actions on the current
    history; the price changes when x exceeds the offer. Every strategy
    is scored +1 when its action matched the correct decision (+1 when
    x <= L, -1 when x > L), else -1.

    Returns
    -------
    (state, price_changed, demand)
    """
    cfg = state.config
    n, s = cfg.n_agents, cfg.n_strategies
    # one uniform per strategy: ties in integer scores are broken by the
    # largest jitter, score gaps >= 1 are never bridged by jitter < 1
    jitter = state.rng.random((n, s))
    selected = np.argmax(state.scores + jitter, axis=1)
    actions_by_strategy = state.tables[:, :, state.history]
    played = actions_by_strategy[np.arange(n), selected]
    demand = int(np.count_nonzero(played > 0))
    price_changed = demand > cfg.offer_size
    if price_changed:
        state.scores -= actions_by_strategy
    else:
        state.scores += actions_by_strategy
    mask = (1 << cfg.memory) - 1
    state.history = ((state.history << 1) | int(price_changed)) & mask
    if price_changed:
        state.event_log.append(state.step)
    state.step += 1
    return state, price_changed, demand


def run_game(config, pair_side="sim", debug=False):
    """Run a full game and return its post-burn-in events.

    One timestep maps to one second. The first ``config.burn_in`` steps
    are discarded; the event series is indexed from the first recorded
    step, with session_length = n_steps.

    Parameters
    ----------
    config : GameConfig
    pair_side : str
        Label for the returned EventSeries.
    debug : bool
        Also return the per-step demand array (burn-in included).

    Returns
    -------
    EventSeries, or (EventSeries, demands) when debug is true
    """
    state = init_game(config)
    n, s = config.n_agents, config.n_strategies
    offer, burn = config.offer_size, config.burn_in
    mask = (1 << config.memory) - 1
    total = burn + config.n_steps
    # row h of slabs is tables[:, :, h] flattened agent-major, so score
    # updates run on the flat view without per-step fancy indexing
    slabs = np.ascontiguousarray(
        state.tables.transpose(2, 0, 1).reshape(2 ** config.memory, n * s)
    ).astype(np.float64)
    scores = state.scores.astype(np.float64)
    flat_scores = scores.reshape(-1)
    offsets = np.arange(n) * s
    history = state.history
    log = []
    demands = np.empty(total, dtype=np.int32) if debug else None

    chunk = 2048
    done = 0
    while done < total:
        span = min(chunk, total - done)
        jitter = state.rng.random((span, n, s))
        for i in range(span):
            ranked = scores + jitter[i]
            selected = ranked.argmax(axis=1)
            row = slabs[history]
            played = row[offsets + selected]
            demand = int(np.count_nonzero(played > 0))
            if debug:
                demands[done + i] = demand
            if demand > offer:
                flat_scores -= row
                history = ((history << 1) | 1) & mask
                log.append(done + i)
            else:
                flat_scores += row
                history = (history << 1) & mask
        done += span

    state.scores = scores.astype(np.int64)
    state.history = history
    state.step = total
    state.event_log = log
    timestamps = np.asarray(
        [t - burn for t in log if t >= burn], dtype=np.int64
    )
    series = EventSeries(
        pair_side=pair_side,
        timestamps=timestamps,
        session_length=config.n_steps,
    )
    if debug:
        return series, demands
    return series


@dataclass
class SweepResult:
    """One grid cell of a parameter sweep."""

    config: GameConfig
    histogram: np.ndarray
    mean_waiting: float
    n_events: int


def sweep(configs, pair_side="sim"):
    """Run each config independently and summarize its waiting times.

    Returns one SweepResult per config, in input order: the waiting-time
    histogram (index tau, counts) and the mean waiting time. Games are
    independent, each driven by its own config seed, so execution order
    cannot affect the output.

    Raises
    ------
    ConfigError
        Empty config list.
    """
    configs = list(configs)
    if not configs:
        raise ConfigError("sweep needs at least one config")
    results = []
    for config in configs:
        series = run_game(config, pair_side=pair_side)
        taus = np.diff(series.timestamps)
        if taus.size:
            histogram = np.bincount(taus)
            mean_waiting = float(taus.mean())
        else:
            histogram = np.zeros(0, dtype=np.int64)
            mean_waiting = float("nan")
        results.append(
            SweepResult(
                config=config,
                histogram=histogram,
                mean_waiting=mean_waiting,
                n_events=int(series.timestamps.size),
            )
        )
    return results


def kl_match(target, result, tau_lo=1, tau_hi=11):
    """K-L divergence of a sweep cell from a target over a tau window.

    Both the target waiting times and the cell histogram are restricted
    to tau in [tau_lo, tau_hi] and renormalized. Returns inf when the
    cell assigns no mass to some tau the target occupies.
    """
    values = np.asarray(getattr(target, "values", target), dtype=np.int64)
    width = tau_hi + 1
    p = np.bincount(values[values <= tau_hi], minlength=width)[tau_lo:width]
    hist = np.zeros(width, dtype=np.float64)
    upto = min(width, result.histogram.size)
    hist[:upto] = result.histogram[:upto]
    q = hist[tau_lo:width]
    if p.sum() == 0:
        raise ConfigError(
            f"target has no waiting times in [{tau_lo}, {tau_hi}]"
        )
    p = p / p.sum()
    if q.sum() == 0:
        return float("inf")
    q = q / q.sum()
    live = p > 0
    if np.any(q[live] == 0):
        return float("inf")
    return float(np.sum(p[live] * np.log2(p[live] / q[live])))
