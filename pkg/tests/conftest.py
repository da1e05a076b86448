from __future__ import annotations

import random

import pytest

from netgym.netsim import NetState, Topology, compute_forwarding, load_topology

# Four-switch diamond used by the bundled scenarios: h1 and h2 sit behind
# s1 and s2, h3 behind s4, with s1-s2, s1-s3, s2-s4 and s3-s4 links.
DIAMOND_DOC = {
    "schema": 1,
    "name": "diamond",
    "nodes": {
        "h1": {
            "kind": "host",
            "interfaces": [
                {"name": "eth0", "port": 1, "connected_to": "s1", "connected_port": 1},
            ],
        },
        "h2": {
            "kind": "host",
            "interfaces": [
                {"name": "eth0", "port": 1, "connected_to": "s2", "connected_port": 1},
            ],
        },
        "h3": {
            "kind": "host",
            "interfaces": [
                {"name": "eth0", "port": 1, "connected_to": "s4", "connected_port": 1},
            ],
        },
        "s1": {
            "kind": "bmv2_switch",
            "interfaces": [
                {"name": "eth0", "port": 1, "connected_to": "h1", "connected_port": 1},
                {"name": "eth1", "port": 2, "connected_to": "s2", "connected_port": 2},
                {"name": "eth2", "port": 3, "connected_to": "s3", "connected_port": 1},
            ],
        },
        "s2": {
            "kind": "bmv2_switch",
            "interfaces": [
                {"name": "eth0", "port": 1, "connected_to": "h2", "connected_port": 1},
                {"name": "eth1", "port": 2, "connected_to": "s1", "connected_port": 2},
                {"name": "eth2", "port": 3, "connected_to": "s4", "connected_port": 2},
            ],
        },
        "s3": {
            "kind": "bmv2_switch",
            "interfaces": [
                {"name": "eth0", "port": 1, "connected_to": "s1", "connected_port": 3},
                {"name": "eth1", "port": 2, "connected_to": "s4", "connected_port": 3},
            ],
        },
        "s4": {
            "kind": "bmv2_switch",
            "interfaces": [
                {"name": "eth0", "port": 1, "connected_to": "h3", "connected_port": 1},
                {"name": "eth1", "port": 2, "connected_to": "s2", "connected_port": 3},
                {"name": "eth2", "port": 3, "connected_to": "s3", "connected_port": 2},
            ],
        },
    },
}

TWO_NODE_DOC = {
    "schema": 1,
    "nodes": {
        "h1": {
            "kind": "host",
            "interfaces": [
                {"name": "eth0", "port": 1, "connected_to": "s1", "connected_port": 1},
            ],
        },
        "s1": {
            "kind": "bmv2_switch",
            "interfaces": [
                {"name": "eth0", "port": 1, "connected_to": "h1", "connected_port": 1},
            ],
        },
    },
}


@pytest.fixture
def diamond() -> Topology:
    return load_topology(DIAMOND_DOC)


@pytest.fixture
def diamond_state(diamond: Topology) -> NetState:
    state = NetState(diamond)
    state.install_tables(compute_forwarding(diamond))
    return state


@pytest.fixture
def rng() -> random.Random:
    return random.Random(42)
