"""
Tests for the error model, weights and syndrome algebra.
"""

import math
import unittest

import numpy as np
import pytest
from pydantic import ValidationError

from mle_decoder.decoders.oracle import brute_force_mle
from mle_decoder.exceptions import (
    DomainError,
    InvalidPermutation,
    InvalidSyndrome,
    UnsupportedProbability,
)
from mle_decoder.model import (
    ErrorChannel,
    ErrorModel,
    Syndrome,
    canonicalize,
    invert_permutation,
    observables_of,
    reorder_detectors,
    syndrome_of,
    validate_syndrome,
    weight_of,
)
from mle_decoder.simulator.generators import gen_random_ldpc


def make_model(*rows, num_detectors=None, num_observables=1, coords=None):
    """Build a model from (probability, detectors, observables) triples."""
    channels = tuple(
        ErrorChannel(index=i, probability=p, detectors=tuple(d), observables=o)
        for i, (p, d, o) in enumerate(rows)
    )
    if num_detectors is None:
        num_detectors = 1 + max((max(c.detectors) for c in channels if c.detectors), default=-1)
    return ErrorModel(
        channels=channels,
        num_detectors=num_detectors,
        num_observables=num_observables,
        detector_coords=coords or {},
    )


class TestWeights(unittest.TestCase):
    """Test cases for weight_of."""

    def test_known_values(self):
        """Test the weight at a few probabilities."""
        self.assertEqual(weight_of(0.5), 0.0)
        self.assertAlmostEqual(weight_of(0.1), math.log(9), places=12)
        self.assertAlmostEqual(weight_of(0.25), math.log(3), places=12)

    def test_domain(self):
        """Test that probabilities outside (0, 1) are rejected."""
        for p in (0.0, 1.0, -0.1, 1.5):
            with self.assertRaises(DomainError):
                weight_of(p)

    def test_strictly_decreasing(self):
        """Test that weight decreases on (0, 1/2]."""
        ps = np.linspace(1e-6, 0.5, 200)
        weights = [weight_of(float(p)) for p in ps]
        self.assertTrue(all(a > b for a, b in zip(weights, weights[1:])))

    def test_channel_weight_field(self):
        """Test that channels expose their weight."""
        channel = ErrorChannel(index=0, probability=0.1, detectors=(0,))
        self.assertAlmostEqual(channel.weight, math.log(9))


class TestModelValidation(unittest.TestCase):
    """Test cases for ErrorModel invariants."""

    def test_incidence_is_transpose(self):
        """Test that incidence lists exactly the channels touching each detector."""
        model = make_model((0.1, (0, 1), 0), (0.2, (1, 2), 1), (0.3, (0,), 0))
        self.assertEqual(model.incidence, ((0, 2), (0, 1), (1,)))
        for d, row in enumerate(model.incidence):
            for e in range(model.num_channels):
                self.assertEqual(e in row, d in model.channels[e].detectors)

    def test_detector_out_of_range(self):
        """Test that a channel naming an unknown detector is rejected."""
        with self.assertRaises(ValidationError):
            make_model((0.1, (0, 3), 0), num_detectors=2)

    def test_unsorted_detectors(self):
        """Test that channel detectors must be strictly increasing."""
        with self.assertRaises(ValidationError):
            ErrorChannel(index=0, probability=0.1, detectors=(2, 1))

    def test_index_must_match_position(self):
        """Test that channel indices follow their position."""
        with self.assertRaises(ValidationError):
            ErrorModel(
                channels=(ErrorChannel(index=1, probability=0.1, detectors=(0,)),),
                num_detectors=1,
            )

    def test_models_are_immutable(self):
        """Test that models cannot be modified after construction."""
        model = make_model((0.1, (0,), 0))
        with self.assertRaises(ValidationError):
            model.num_detectors = 5

    def test_path_cost(self):
        """Test that the path cost sums weights."""
        model = make_model((0.1, (0,), 0), (0.25, (0,), 0))
        self.assertAlmostEqual(model.path_cost([1, 0]), math.log(9) + math.log(3))


class TestSyndromeAlgebra(unittest.TestCase):
    """Test cases for syndrome_of and observables_of."""

    def setUp(self):
        """Set up a small model."""
        self.model = make_model((0.1, (0, 1), 1), (0.1, (1, 2), 1), (0.1, (), 1))

    def test_empty_set(self):
        """Test the empty error set."""
        self.assertEqual(syndrome_of(self.model, []), Syndrome())
        self.assertEqual(observables_of(self.model, []), 0)

    def test_symmetric_difference(self):
        """Test that shared detectors cancel."""
        self.assertEqual(syndrome_of(self.model, [0, 1]).activated, frozenset({0, 2}))

    def test_observable_cancellation(self):
        """Test that two channels flipping L0 cancel."""
        self.assertEqual(observables_of(self.model, [0]), 1)
        self.assertEqual(observables_of(self.model, [0, 1]), 0)

    def test_linearity(self):
        """Test that syndrome_of is linear under symmetric difference."""
        rng = np.random.default_rng(5)
        model = gen_random_ldpc(12, 8, 3, (0.01, 0.4), rng)
        for _ in range(200):
            f = set(np.flatnonzero(rng.random(model.num_channels) < 0.5).tolist())
            g = set(np.flatnonzero(rng.random(model.num_channels) < 0.5).tolist())
            self.assertEqual(
                syndrome_of(model, f ^ g), syndrome_of(model, f).xor(syndrome_of(model, g))
            )

    def test_invalid_syndrome(self):
        """Test that syndromes naming unknown detectors are rejected."""
        with self.assertRaises(InvalidSyndrome):
            validate_syndrome(self.model, Syndrome.of([7]))

    def test_bad_channel_index(self):
        """Test that unknown channel indices raise IndexError."""
        with self.assertRaises(IndexError):
            syndrome_of(self.model, [3])


class TestCanonicalize(unittest.TestCase):
    """Test cases for canonicalize."""

    def test_merge_duplicates(self):
        """Test that identical channels merge with the exclusive-or probability."""
        model = canonicalize(make_model((0.1, (0,), 0), (0.2, (0,), 0)))
        self.assertEqual(model.num_channels, 1)
        self.assertAlmostEqual(model.channels[0].probability, 0.26, places=12)

    def test_rejects_high_probability(self):
        """Test that probabilities above 1/2 are refused."""
        with self.assertRaises(UnsupportedProbability):
            canonicalize(make_model((0.6, (0,), 0)))

    def test_drops_empty_channels(self):
        """Test that channels flipping nothing are dropped and indices renumbered."""
        model = canonicalize(make_model((0.1, (), 0), (0.2, (0,), 0)))
        self.assertEqual(model.num_channels, 1)
        self.assertEqual(model.channels[0].index, 0)
        self.assertEqual(model.channels[0].detectors, (0,))

    def test_merge_keeps_first_position(self):
        """Test that a merged channel sits where its first occurrence was."""
        model = canonicalize(
            make_model((0.1, (1,), 0), (0.1, (0,), 0), (0.2, (1,), 0), (0.3, (0, 1), 0))
        )
        self.assertEqual([c.detectors for c in model.channels], [(1,), (0,), (0, 1)])

    def test_keeps_pure_logical(self):
        """Test that undetectable observable flips are kept and counted."""
        model = canonicalize(make_model((0.1, (), 1), (0.2, (0,), 0)))
        self.assertEqual(model.num_pure_logical, 1)

    def test_identity_without_duplicates(self):
        """Test that a canonical model is unchanged."""
        model = make_model((0.1, (0,), 0), (0.2, (0, 1), 1))
        self.assertEqual(canonicalize(model), model)

    def test_idempotent(self):
        """Test that canonicalizing twice changes nothing."""
        for seed in range(20):
            model = gen_random_ldpc(14, 4, 2, (0.01, 0.4), seed)
            self.assertEqual(canonicalize(model), model)


class TestReorderDetectors(unittest.TestCase):
    """Test cases for reorder_detectors."""

    def setUp(self):
        """Set up a model with coordinates."""
        self.model = make_model(
            (0.1, (0, 2), 0),
            (0.2, (1,), 1),
            num_detectors=3,
            coords={0: (0.0,), 1: (1.0,), 2: (2.0,)},
        )

    def test_identity(self):
        """Test that the identity permutation leaves the model equal."""
        self.assertEqual(reorder_detectors(self.model, [0, 1, 2]), self.model)

    def test_inverse(self):
        """Test that a permutation followed by its inverse is the identity."""
        perm = [2, 0, 1]
        there = reorder_detectors(self.model, perm)
        back = reorder_detectors(there, invert_permutation(perm))
        self.assertEqual(back, self.model)

    def test_swap(self):
        """Test relabeling with a swap of detectors 0 and 1."""
        swapped = reorder_detectors(self.model, [1, 0, 2])
        self.assertEqual(swapped.channels[0].detectors, (1, 2))
        self.assertEqual(swapped.detector_coords[1], (0.0,))

    def test_invalid_permutation(self):
        """Test that non-bijections are rejected."""
        with self.assertRaises(InvalidPermutation):
            reorder_detectors(self.model, [0, 0, 1])
        with self.assertRaises(InvalidPermutation):
            reorder_detectors(self.model, [0, 1])


@pytest.mark.parametrize("seed", range(10))
def test_reorder_preserves_optimal_cost(seed):
    """Test that relabeling detectors does not change the optimal decode cost."""
    rng = np.random.default_rng(seed)
    model = gen_random_ldpc(10, 6, 3, (0.01, 0.4), rng)
    perm = rng.permutation(model.num_detectors).tolist()
    relabeled = reorder_detectors(model, perm)
    fired = np.flatnonzero(rng.random(model.num_channels) < 0.3).tolist()
    syndrome = syndrome_of(model, fired)
    moved = Syndrome.of(perm[d] for d in syndrome.activated)
    assert brute_force_mle(model, syndrome).cost == pytest.approx(
        brute_force_mle(relabeled, moved).cost, abs=1e-9
    )
