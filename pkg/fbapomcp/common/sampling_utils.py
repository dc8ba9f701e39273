import numpy as np


def sample_categorical(weights: np.ndarray, rng: np.random.Generator) -> int:
    """
    Draw an index proportional to nonnegative ``weights`` (need not be normalized).

    Callers guarantee a positive total; zero-weight entries are never returned.
    """
    cumulative = np.cumsum(weights)
    u = rng.random() * cumulative[-1]
    index = int(np.searchsorted(cumulative, u, side="right"))
    # guards the u == total edge case from float rounding
    return min(index, len(cumulative) - 1)


def stream_generator(seed: int, *keys: int) -> np.random.Generator:
    """
    Reproducible generator for one (run, stream) pair, independent of how many
    other streams exist or in which process they are created.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, *keys]))
