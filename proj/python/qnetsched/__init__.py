"""Central-controller engine and simulator for generate-when-requested
quantum networks: topology and path machinery, admission control, periodic
schedule computation, and seeded scenario runs.

The heavy lifting happens in the compiled extension; this package wraps the
json-string boundary with plain dicts.
"""

import json as _json

from . import _core
from ._core import (
    ConfigError,
    InvalidWindow,
    binomial_tail_below,
    minimal_allocation,
    packet_success_probability,
)

__all__ = [
    "ConfigError",
    "InvalidWindow",
    "allowed_paths",
    "binomial_tail_below",
    "dumbbell_topology",
    "minimal_allocation",
    "packet_success_probability",
    "path_partition",
    "random_topology",
    "required_time",
    "run_scenario",
    "validate_graph",
    "validate_schedule",
]


def random_topology(backbones, local_areas, end_nodes, seed=1, discoverable_fraction=0.25):
    return _json.loads(
        _core.random_topology(backbones, local_areas, end_nodes, seed, discoverable_fraction)
    )


def dumbbell_topology():
    return _json.loads(_core.dumbbell_topology())


def validate_graph(topology):
    return _json.loads(_core.validate_graph(_json.dumps(topology)))


def allowed_paths(topology):
    return _json.loads(_core.allowed_paths(_json.dumps(topology)))


def path_partition(topology):
    return _json.loads(_core.path_partition(_json.dumps(topology)))


def required_time(pgts):
    """Upper bound in seconds on the minimum sequentially valid schedule for
    one filling class; `pgts` is a list of task dicts."""
    return _core.required_time(_json.dumps(pgts))


def run_scenario(config, jobs=1):
    return _json.loads(_core.run_scenario(_json.dumps(config), jobs))


def validate_schedule(schedule_jsonl, pgts, t_si_s):
    return _json.loads(_core.validate_schedule(schedule_jsonl, _json.dumps(pgts), t_si_s))
