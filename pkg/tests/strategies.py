"""Hypothesis strategies producing random games and strategies from seeds."""

from hypothesis import strategies as st

from stochgame import generators as G

seeds = st.integers(0, 2**32 - 1)


@st.composite
def simsg_and_strategy(draw, max_n=3, max_S=3, max_actions=3):
    seed = draw(seeds)
    spec = G.random_simsg(seed, n=draw(st.integers(1, max_n)), S=draw(st.integers(1, max_S)),
                          max_actions=max_actions, gamma=draw(st.sampled_from([0.3, 0.5, 0.8])))
    return spec, G.random_strategy(seed + 1, spec)


@st.composite
def tbsg_and_strategy(draw, max_n=3, max_S=4):
    seed = draw(seeds)
    n = draw(st.integers(1, max_n))
    spec = G.random_tbsg(seed, n=n, S=draw(st.integers(n, max(n, max_S))), max_actions=3,
                         gamma=draw(st.sampled_from([0.3, 0.5, 0.8])))
    return spec, G.random_strategy(seed + 1, spec)


@st.composite
def ossg_and_strategy(draw, max_n=4):
    seed = draw(seeds)
    spec = G.random_ossg(seed, n=draw(st.integers(1, max_n)), max_actions=3, gamma=0.5)
    return spec, G.random_strategy(seed + 1, spec)
