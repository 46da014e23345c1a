"""Deterministic random-stream derivation.

A single master seed is expanded into named substreams through
``numpy.random.SeedSequence`` spawn keys, so every consumer of
randomness owns an independent stream that is reproducible regardless
of evaluation order or worker count.  The derivation path is
``SeedSequence(master, spawn_key=(stream, *indices))`` with the stream
ids below; run records echo this scheme.
"""

from __future__ import annotations

import numpy as np

STREAM_PLACEMENT = 0
STREAM_FIELD = 1
STREAM_NOISE = 2
STREAM_PLANNER = 3

SEED_SCHEME = {
    "derivation": "numpy.random.SeedSequence(master_seed, spawn_key=(stream, *indices))",
    "streams": {
        "placement": STREAM_PLACEMENT,
        "field-sample": STREAM_FIELD,
        "measurement-noise": STREAM_NOISE,
        "planner": STREAM_PLANNER,
    },
}


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Generator for the substream addressed by ``path`` under ``master_seed``."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(path)))


def substream_seed(master_seed: int, *path: int) -> int:
    """Integer seed for the substream, for APIs that take a plain seed."""
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(path))
    return int(seq.generate_state(1, np.uint64)[0])
