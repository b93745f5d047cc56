"""
Tests for the brute-force and Dijkstra reference decoders.
"""

import math
import unittest

import numpy as np
import pytest

from mle_decoder.decoders.oracle import (
    MAX_BRUTE_FORCE_CHANNELS,
    brute_force_decode,
    brute_force_mle,
    dijkstra_decode,
)
from mle_decoder.decoders.search import decode
from mle_decoder.exceptions import TooLarge, Unsatisfiable
from mle_decoder.model import ErrorChannel, ErrorModel, Syndrome, syndrome_of
from mle_decoder.simulator.generators import gen_random_ldpc, gen_repetition_code

W = math.log(9)


def chain_model():
    channels = tuple(
        ErrorChannel(index=i, probability=0.1, detectors=d)
        for i, d in enumerate([(0,), (0, 1), (1,)])
    )
    return ErrorModel(channels=channels, num_detectors=2)


class TestBruteForce(unittest.TestCase):
    """Test cases for brute_force_mle."""

    def setUp(self):
        """Set up the three-channel chain model."""
        self.model = chain_model()

    def test_empty_syndrome(self):
        """Test that the empty set is the unique optimum of an empty syndrome."""
        result = brute_force_mle(self.model, Syndrome())
        self.assertEqual(result.cost, 0.0)
        self.assertEqual(result.errors, ())
        self.assertEqual(result.optima_count, 1)

    def test_chain(self):
        """Test the shared channel is the optimum for both detectors."""
        result = brute_force_mle(self.model, Syndrome.of([0, 1]))
        self.assertAlmostEqual(result.cost, W, places=9)
        self.assertEqual(result.errors, (1,))
        self.assertEqual(result.optima_count, 1)

    def test_unsatisfiable(self):
        """Test that a syndrome no subset produces raises Unsatisfiable."""
        model = ErrorModel(
            channels=(ErrorChannel(index=0, probability=0.1, detectors=(0, 1)),), num_detectors=2
        )
        with self.assertRaises(Unsatisfiable):
            brute_force_mle(model, Syndrome.of([0]))

    def test_too_large(self):
        """Test that large models are refused."""
        n = MAX_BRUTE_FORCE_CHANNELS + 1
        model = ErrorModel(
            channels=tuple(
                ErrorChannel(index=i, probability=0.1, detectors=(i,)) for i in range(n)
            ),
            num_detectors=n,
        )
        with self.assertRaises(TooLarge):
            brute_force_mle(model, Syndrome())

    def test_degenerate_optima(self):
        """Test that equal-cost optima are counted and the smallest set returned."""
        model = ErrorModel(
            channels=(
                ErrorChannel(index=0, probability=0.1, detectors=(0,)),
                ErrorChannel(index=1, probability=0.1, detectors=(0,)),
            ),
            num_detectors=1,
        )
        result = brute_force_mle(model, Syndrome.of([0]))
        self.assertEqual(result.optima_count, 2)
        self.assertEqual(result.errors, (0,))

    def test_many_detectors(self):
        """Test enumeration on a model with more than 64 detectors."""
        model = ErrorModel(
            channels=(
                ErrorChannel(index=0, probability=0.1, detectors=(0, 70)),
                ErrorChannel(index=1, probability=0.1, detectors=(70,)),
                ErrorChannel(index=2, probability=0.2, detectors=(1, 69)),
            ),
            num_detectors=71,
        )
        result = brute_force_mle(model, Syndrome.of([0]))
        self.assertEqual(result.errors, (0, 1))
        self.assertAlmostEqual(result.cost, 2 * W, places=9)

    def test_decode_wrapper(self):
        """Test that the decoder wrapper predicts observables."""
        model = gen_repetition_code(3, 0.1)
        outcome = brute_force_decode(model, Syndrome.of([0]))
        self.assertEqual(outcome.errors, (0,))
        self.assertEqual(outcome.predicted_observables, 1)
        self.assertFalse(outcome.low_confidence)


class TestDijkstra(unittest.TestCase):
    """Test cases for dijkstra_decode."""

    def test_empty_syndrome(self):
        """Test that an empty syndrome costs nothing."""
        outcome = dijkstra_decode(chain_model(), Syndrome())
        self.assertEqual(outcome.cost, 0.0)
        self.assertEqual(outcome.errors, ())

    def test_chain(self):
        """Test that uniform-cost search finds the optimum on the chain."""
        outcome = dijkstra_decode(chain_model(), Syndrome.of([0, 1]))
        self.assertEqual(outcome.errors, (1,))

    def test_pqlimit(self):
        """Test that the queue limit applies to the uniform-cost search."""
        outcome = dijkstra_decode(chain_model(), Syndrome.of([0, 1]), pqlimit=1)
        self.assertTrue(outcome.low_confidence)


def _instance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 15))
    k = int(rng.integers(1, 11))
    return gen_random_ldpc(n, k, 3, (0.01, 0.4), rng), rng


@pytest.mark.slow
def test_three_way_agreement():
    """Test that brute force, Dijkstra and exact A* agree on random instances."""
    for seed in range(500):
        model, rng = _instance(seed)
        for _ in range(20):
            fired = np.flatnonzero(rng.random(model.num_channels) < rng.uniform(0.1, 0.6)).tolist()
            syndrome = syndrome_of(model, fired)
            oracle = brute_force_mle(model, syndrome)
            astar = decode(model, syndrome)
            dijkstra = dijkstra_decode(model, syndrome)
            assert not astar.low_confidence and not dijkstra.low_confidence
            assert astar.cost == pytest.approx(oracle.cost, abs=1e-9)
            assert dijkstra.cost == pytest.approx(oracle.cost, abs=1e-9)
            if oracle.optima_count == 1:
                assert astar.errors == oracle.errors
                assert dijkstra.errors == oracle.errors


@pytest.mark.parametrize("seed", range(30))
def test_unreachable_syndromes(seed):
    """Test that syndromes outside the code space are low-confidence for the search."""
    model, rng = _instance(seed)
    for _ in range(5):
        activated = np.flatnonzero(rng.random(model.num_detectors) < 0.5).tolist()
        syndrome = Syndrome.of(d for d in activated if model.incidence[d])
        try:
            expected = brute_force_mle(model, syndrome)
        except Unsatisfiable:
            assert decode(model, syndrome).low_confidence
            assert dijkstra_decode(model, syndrome).low_confidence
        else:
            assert decode(model, syndrome).cost == pytest.approx(expected.cost, abs=1e-9)
