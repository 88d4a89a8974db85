"""Smoke tests for the Python bindings."""

import cmath
import math
import os

import pytest

import fdeq

MODELS = os.environ.get("FDEQ_MODELS_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "models"))

SEMICIRCLE = """
[space]
blocks = [1]

[[element]]
name = "s"
kind = "semicircular"
block = 0

[polynomial]
expr = "s"
"""


def test_oracles():
    assert fdeq.ncp2_count(12) == 132
    assert fdeq.pairings_count(8) == 105
    assert fdeq.catalan(4) == 14
    assert fdeq.circular_word_moment("1**1") == 1
    assert fdeq.circular_word_moment("1*1*") == 2


def test_semicircle_transform_and_density():
    model = fdeq.load_config_text(SEMICIRCLE)
    g = fdeq.scalar_cauchy(model, 2j)
    assert abs(g - (1 - math.sqrt(2)) * 1j) < 1e-9

    out = fdeq.solve_density(model, lo=-3.0, hi=3.0, points=301, epsilon=1e-3)
    mid = out["density"][150]
    assert abs(out["t"][150]) < 1e-12
    assert abs(mid - 1 / math.pi) < 2e-3
    assert 0.99 < out["mass"] < 1.001
    assert abs(out["moments"][1] - 1.0) < 0.05


def test_wishart_fixed_point():
    model = fdeq.load_config(os.path.join(MODELS, "mp_square.toml"))
    z = 1 + 0.01j
    g = fdeq.scalar_cauchy(model, z)
    assert abs(g - 1 / (z - 1 / (1 - g))) < 1e-8


def test_mc_and_ks():
    model = fdeq.load_config(os.path.join(MODELS, "mp_square.toml"))
    eigs = fdeq.mc_spectrum(model, m=60, reps=5, seed=11)
    assert len(eigs) == 60 * 5
    ks = fdeq.ks_distance(model, eigs, lo=-0.5, hi=4.5, points=400)
    assert ks < 0.1


def test_errors_surface_as_python_exceptions():
    with pytest.raises(fdeq.FdeqError):
        fdeq.load_config_text("[space]\nblocks = [2]\n")  # missing polynomial
    with pytest.raises(fdeq.FdeqError):
        fdeq.circular_word_moment("abc")


def test_model_introspection():
    model = fdeq.load_config(os.path.join(MODELS, "q_model.toml"))
    assert model.blocks == [5, 8, 4]
    assert model.target_block == 0
    kinds = {s["name"]: s["kind"] for s in model.symbols}
    assert kinds["u1"] == "haar"
    assert kinds["R1"] == "deterministic"
