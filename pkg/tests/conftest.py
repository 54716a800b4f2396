"""
Shared pytest fixtures for Fault Complex Toolkit tests.
"""

import json
import os
import sys

import numpy as np
import pytest

# Ensure the project root is on sys.path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from fault_complex.codes import RepetitionSpec, Variant, parse_code, repetition
from fault_complex.decoder import DecodeConfig
from fault_complex.foliation import product
from fault_complex.gf2 import BinMatrix


def _support_rows(n, supports):
    bits = np.zeros((len(supports), n), dtype=np.uint8)
    for k, support in enumerate(supports):
        bits[k, list(support)] = 1
    return BinMatrix(bits)


# ─── Fixtures: Codes ───

@pytest.fixture
def rep_full_3():
    """Full-rank repetition complex, 2 checks on 3 bits."""
    return repetition(RepetitionSpec(3, Variant.FULL_RANK))


@pytest.fixture
def rep_cyclic_3():
    """Cyclic repetition complex, 3 checks on 3 bits."""
    return repetition(RepetitionSpec(3, Variant.CYCLIC))


@pytest.fixture
def toric2d_3():
    """2D toric code of linear size 3 (dims 9, 18, 9)."""
    return parse_code("toric:2:3").complex


@pytest.fixture
def surface_rs_3():
    """Planar surface code: one rough and one smooth axis, 13 qubits."""
    return parse_code("surface:rs:3").complex


# ─── Fixtures: Fault complexes ───

@pytest.fixture
def memory_fc(rep_full_3, toric2d_3):
    """rep:full:3 × toric:2:3, primal faults on grade 1."""
    return product(rep_full_3, toric2d_3, 1)


@pytest.fixture
def cyclic_fc(rep_cyclic_3, toric2d_3):
    """rep:cyclic:3 × toric:2:3, primal faults on grade 1."""
    return product(rep_cyclic_3, toric2d_3, 1)


# ─── Fixtures: Decoding ───

@pytest.fixture
def decode_config():
    return DecodeConfig(bp_iters=30, min_sum_scale=1.0, osd_order=10)


# ─── Fixtures: Subsystem codes ───

@pytest.fixture
def bacon_shor_3():
    """3×3 Bacon–Shor gauge and stabilizer generators on qubits 3·row + col."""
    n = 9
    g_x = [{3 * i + j, 3 * (i + 1) + j} for i in range(2) for j in range(3)]
    g_z = [{3 * i + j, 3 * i + j + 1} for i in range(3) for j in range(2)]
    h_x = [{3 * i + j for j in range(3)} | {3 * (i + 1) + j for j in range(3)} for i in range(2)]
    h_z = [{3 * i + j for i in range(3)} | {3 * i + j + 1 for i in range(3)} for j in range(2)]
    return {
        "G_X": _support_rows(n, g_x),
        "G_Z": _support_rows(n, g_z),
        "H_X": _support_rows(n, h_x),
        "H_Z": _support_rows(n, h_z),
    }


# ─── Fixtures: Config ───

@pytest.fixture
def sample_yaml_config(tmp_path):
    """A small zero-noise memory run."""
    config_content = """
code:
  family: toric
  dimension: 2
  sizes: [3]
repetition:
  delta: 2
noise:
  model: phenomenological
  p: [0.0]
window:
  w: 1
  c: 1
experiment:
  name: smoke
  kind: memory
  side: primal
  trials: 6
  chunk_size: 3
seed: 11
"""
    config_file = tmp_path / "run.yaml"
    config_file.write_text(config_content)
    return str(config_file)


@pytest.fixture
def sample_json_config(tmp_path):
    config = {
        "code": {"family": "surface", "pattern": "rs", "sizes": [3]},
        "repetition": {"delta": 2},
        "noise": {"model": "phenomenological", "p": 0.0},
        "experiment": {"kind": "memory", "trials": 4},
    }
    config_file = tmp_path / "run.json"
    config_file.write_text(json.dumps(config))
    return str(config_file)


# ─── Fixtures: Fits ───

@pytest.fixture
def tanh_rows():
    """Noise-free CSV rows following the tanh model with p_th = 0.1."""
    from fault_complex.fit import model_tanh, rescale

    rows = []
    for d in (3, 5, 7):
        for p in (0.08, 0.09, 0.10, 0.11, 0.12):
            x = float(rescale(p, 0.1, d, 1.0))
            rate = float(model_tanh(x, 0.5, 10.0, 1.0))
            rows.append({
                "experiment": "synthetic", "kind": "memory", "code": f"toric:3:{d}",
                "L": d, "D": 3, "side": "primal", "w": 1, "c": 1, "rounds": 4,
                "noise_param": p, "trials": 100000, "failures": int(round(rate * 100000)),
                "rate": rate, "stderr": (rate * (1 - rate) / 100000) ** 0.5, "seed": 0,
            })
    return rows
