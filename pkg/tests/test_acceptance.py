"""Release gate: one test per criterion, reported as a PASS/FAIL line each.

The criteria pin the worked statistical examples, the behavioral
contracts of every stage, and the bundled-corpus comparisons.  Numeric
tolerances are stated inline; fixtures are seeded so every number here
is a constant of the repository.
"""

import math
import time

import numpy as np
import pytest

from statedge.core import make_rng
from statedge.corpus import load_corpus
from statedge.evaluate import bench, f_measure, mse, psnr
from statedge.gradient import MembershipConfig, membership
from statedge.independence import (ContingencyTable, chi_square_test,
                                   displacement_table, fisher_exact_test)
from statedge.noise import NoiseSpec
from statedge.pipeline import PipelineConfig, config_from_mapping, detect
from statedge.refine import dilate, erode
from statedge.regionfilter import RegionFilterConfig, filter_regions

from oracles import chi_square_sf_reference, edit_replay, enumerate_tables

pytestmark = pytest.mark.acceptance


def test_criterion_01_sparse_table_worked_example():
    # point probability of (83, 0, 89, 10) rejects independence, fast
    table = ContingencyTable(83, 0, 89, 10)
    start = time.perf_counter()
    for _ in range(200):
        result = fisher_exact_test(table)
    per_call = (time.perf_counter() - start) / 200
    assert 0.0015 <= result.p <= 0.0025
    assert result.dependent
    assert per_call < 1e-3


def test_criterion_02_filled_table_worked_example():
    # (21, 24, 21, 15) accepts independence; p agrees with the reference
    # distribution oracle; the hand-computed statistic is 1.0904
    result = chi_square_test(ContingencyTable(21, 24, 21, 15))
    assert result.statistic == pytest.approx(1.0904, abs=1e-3)
    assert result.p == pytest.approx(chi_square_sf_reference(result.statistic),
                                     abs=1e-6)
    assert not result.dependent


def test_criterion_03_hypergeometric_normalization():
    # exhaustive fixed-margin enumerations are a probability distribution
    rng = make_rng(1203)
    for _ in range(50):
        row1, row2 = (int(v) for v in rng.integers(1, 31, size=2))
        n = row1 + row2
        lo, hi = max(0, n - 30), min(30, n)
        col1 = int(rng.integers(lo, hi + 1))
        total = sum(p for _, p in enumerate_tables(row1, row2, col1))
        assert total == pytest.approx(1.0, abs=1e-10)


def test_criterion_04_displacement_worked_examples():
    # the pair (2,3)/(1,1) is exactly 1 apart in x and 2 apart in y
    pts = [(2, 3), (1, 1)]
    assert displacement_table(pts, limit=0).d == 2   # both gaps exceed 0
    assert displacement_table(pts, limit=1).b == 2   # x within 1, y beyond
    assert displacement_table(pts, limit=2).a == 2   # both within 2
    # fourteen collinear unit-spaced points make 14*13 ordered pairs
    collinear = [(i, i) for i in range(14)]
    assert displacement_table(collinear).n == 182


def _edit_fixtures():
    line = np.zeros((200, 200), dtype=bool)
    idx = np.arange(80)
    line[60 + idx, 60 + idx] = True
    rng = make_rng(1205)
    flat = rng.choice(200 * 200, size=40, replace=False)
    noise = np.zeros((200, 200), dtype=bool)
    noise[np.unravel_index(flat, (200, 200))] = True
    return line, noise, line | noise


def test_criterion_05_region_filter_on_synthetics():
    # defaults (window 15, stride 5, limit 3, alpha 0.05): a sloped line
    # survives, scattered specks die, and the independent replay agrees
    line, noise, mixed = _edit_fixtures()
    cfg = RegionFilterConfig()

    start = time.perf_counter()
    kept_line = filter_regions(line, cfg)
    assert time.perf_counter() - start < 2.0
    idx = np.arange(80)
    assert kept_line[60 + idx, 60 + idx].mean() >= 0.90

    start = time.perf_counter()
    kept_noise = filter_regions(noise, cfg)
    assert time.perf_counter() - start < 2.0
    assert kept_noise.sum() <= 40 * 0.20  # at least 80 percent removed

    start = time.perf_counter()
    kept_mixed = filter_regions(mixed, cfg)
    assert time.perf_counter() - start < 2.0

    assert np.array_equal(kept_line, edit_replay(line))
    assert np.array_equal(kept_noise, edit_replay(noise))
    assert np.array_equal(kept_mixed, edit_replay(mixed))


def test_criterion_06_membership_identities():
    cfg = MembershipConfig(k=5.0, x0=0.4)
    assert membership(np.array([0.4]), cfg)[0] == 0.5
    assert membership(np.array([1.4]), cfg)[0] == pytest.approx(0.99331, abs=1e-5)
    d = make_rng(1206).uniform(0.0, 20.0, size=100)
    total = membership(0.4 + d, cfg) + membership(0.4 - d, cfg)
    assert np.all(np.abs(total - 1.0) < 1e-12)


def test_criterion_07_metric_identities():
    plane = make_rng(1207).random((16, 16))
    assert mse(plane, plane) == 0.0
    assert math.isinf(psnr(plane, plane))
    rng = make_rng(1208)
    for _ in range(20):
        a, b = rng.random((16, 16)), rng.random((16, 16))
        err = mse(a, b)
        assert psnr(a, b) == pytest.approx(10 * math.log10(255 ** 2 / err),
                                           abs=1e-9)
        pred = rng.random((16, 16)) < 0.2
        gt = rng.random((16, 16)) < 0.2
        rep = f_measure(pred, gt)
        if rep.precision + rep.recall > 0:
            want = 2 * rep.precision * rep.recall / (rep.precision + rep.recall)
            assert abs(rep.f_measure - want) < 1e-12


def test_criterion_08_morphology_algebra():
    rng = make_rng(1209)
    for _ in range(100):
        mask = rng.random((32, 32)) < rng.uniform(0.05, 0.6)
        assert np.all(dilate(mask) >= mask)
        assert np.all(erode(mask) <= mask)
        closed = erode(dilate(mask))
        assert np.array_equal(erode(dilate(closed)), closed)


def test_criterion_09_bundled_corpus_comparison(corpus_dir):
    # full pipeline vs the thresholded-gradient baseline and two ablations
    triples = load_corpus(corpus_dir)
    start = time.perf_counter()
    full = bench(triples)["mean"]["f"]
    baseline = bench(triples, detector="baseline")["mean"]["f"]
    no_edit = bench(triples, PipelineConfig(use_region_filter=False))["mean"]["f"]
    no_median = bench(triples, config_from_mapping({"no-median": True}))["mean"]["f"]
    wall = time.perf_counter() - start
    assert full >= baseline
    assert no_edit <= full
    assert no_median <= full
    assert wall < 30.0


def test_criterion_10_noise_robustness(corpus_dir):
    # ten percent salt-and-pepper moves the corpus mean F by under 0.15,
    # and the corruption is a pure function of the seed
    triples = load_corpus(corpus_dir)
    clean = bench(triples)["mean"]["f"]
    cfg = PipelineConfig(noise=NoiseSpec("salt-pepper", 0.10, seed=3))
    noisy = bench(triples, cfg)
    again = bench(triples, cfg)
    assert abs(clean - noisy["mean"]["f"]) <= 0.15
    assert noisy["images"] == again["images"]


def test_criterion_11_end_to_end_determinism(corpus_dir):
    configs = (PipelineConfig(),
               PipelineConfig(noise=NoiseSpec("gaussian", 10.0, seed=5)))
    for name, img, _ in load_corpus(corpus_dir):
        for cfg in configs:
            first = detect(img, cfg)
            second = detect(img, cfg)
            assert first.tobytes() == second.tobytes(), name
