"""Interactive group-order protocols over black-box solvable groups."""

import json

from ._core import (
    ClosureOverflow,
    MalformedMessage,
    NotSolvable,
    adversaries,
    encoding_length,
    group_order,
    mu_sequence,
    prime_factors,
    run_protocol,
    wilson_interval,
)
from . import _core

__all__ = [
    "ClosureOverflow",
    "MalformedMessage",
    "NotSolvable",
    "adversaries",
    "encoding_length",
    "fixtures",
    "group_order",
    "mu_sequence",
    "pcgs",
    "prime_factors",
    "run_campaign",
    "run_protocol",
    "sampler_test",
    "wilson_interval",
]


def fixtures():
    """Built-in fixture catalog as a list of dicts."""
    return json.loads(_core.fixtures_json())


def pcgs(spec, primes=()):
    """PCGS and prime refinement of a group spec."""
    return json.loads(_core.pcgs_json(spec, list(primes)))


def sampler_test(spec, mode="exact", epsilon=1 / 256, draws=10_000, seed=0):
    return json.loads(_core.sampler_test_json(spec, mode, epsilon, draws, seed))


def run_campaign(spec, protocol="2msg", prover="honest", primes=(), trials=1, repetitions=1, seed=0,
                 target_round=None, threads=0):
    """Seeded Monte-Carlo campaign; returns the report as a dict."""
    return json.loads(_core.run_campaign_json(spec, protocol, prover, list(primes), trials, repetitions, seed,
                                              target_round, threads))
