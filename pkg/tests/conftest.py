import math

import pytest

from sensedag import BandSpec, DagGraph, DagNode, SensingParams, SinrTrace


def mk_node(nid, branch=0, d=1.0, r_on=0.3, w_on=0.2, r_off=4.0, w_off=3.0, label=""):
    return DagNode(nid, branch, d, r_on, w_on, r_off, w_off, label)


def mk_graph(nodes, edges, entries=None):
    return DagGraph(tuple(nodes), tuple(edges), entries or {})


def mk_band(band_id=1, eta=80_000.0, bandwidth=180e3, threshold_db=6.0, entry=0):
    return BandSpec(band_id, eta, bandwidth, threshold_db, entry)


def mk_trace(rows, lo=5.0, hi=20.0, seed=0):
    """SINR trace from explicit per-band rows of dB values."""
    return SinrTrace(rows, seed, (lo, hi))


@pytest.fixture
def params():
    return SensingParams(slot_ms=1.0, max_spectral_eff=8.0, t_max=2000)


# Worked two-node chain: same branch, d=5 each, on-chip w/r 0.2/0.3,
# off-chip w/r 3/4. Co-location finishes at 10.5; the off-core candidate
# would not start before 12.
@pytest.fixture
def chain_pair():
    u = mk_node(0, branch=1, d=5.0, r_on=0.3, w_on=0.2, r_off=4.0, w_off=3.0, label="u")
    v = mk_node(1, branch=1, d=5.0, r_on=0.3, w_on=0.2, r_off=4.0, w_off=3.0, label="v")
    return mk_graph([u, v], [(0, 1)], {1: 0})
