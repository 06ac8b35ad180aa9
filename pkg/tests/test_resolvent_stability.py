"""Resolvent growth probes, pole orders, strong stability, perturbations."""

import numpy as np
import pytest

from krein_spectra import (
    KreinOperator,
    KreinSpace,
    SpectralType,
    build_normal_with_types,
    classified_spectrum,
    perturb_structured,
    resolvent_probe,
    sample_generator_spec,
    strong_stability_check,
)
from krein_spectra.generators import GeneratorSpec, classification_margin

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


class TestResolventProbe:
    def test_hilbert_space_constant_is_one(self):
        n = KreinOperator(np.diag([1.0, 2.0, 3.0j]), KreinSpace.euclidean(3))
        probe = resolvent_probe(n, 1.0, radii=[0.4, 0.2, 0.1], samples_per_radius=12)
        assert probe.c_estimate == pytest.approx(1.0, abs=1e-9)
        assert probe.pole_order == 1

    def test_jordan_witness_has_second_order_pole(self):
        n = KreinOperator(np.array([[3 + 1j, 1.0], [0.0, 3 + 1j]]), KreinSpace(SWAP))
        probe = resolvent_probe(n, 3 + 1j, radii=[0.5], samples_per_radius=8)
        assert probe.pole_order == 2

    def test_two_sided_positive_point_has_first_order_pole(self):
        rng = np.random.default_rng(50)
        found = 0
        for _ in range(20):
            gen = build_normal_with_types(sample_generator_spec(rng, 6))
            tsp = [
                t for t in gen.ground_truth
                if t.expected_type is SpectralType.TWO_SIDED_POSITIVE
            ]
            if not tsp:
                continue
            found += 1
            probe = resolvent_probe(
                gen.operator, tsp[0].value, radii=[0.1, 0.05], samples_per_radius=8
            )
            assert probe.pole_order == 1
        assert found >= 5

    def test_radii_validation(self):
        n = KreinOperator(np.eye(2), KreinSpace.euclidean(2))
        with pytest.raises(ValueError, match="decreasing"):
            resolvent_probe(n, 1.0, radii=[0.1, 0.2])


class TestStrongStability:
    def test_definite_pair_is_stable(self):
        n = KreinOperator(np.diag([1.0, 2.0]), KreinSpace.indefinite(1, 1))
        stable, decomposition = strong_stability_check(n)
        assert stable
        assert decomposition.certified
        np.testing.assert_allclose(
            np.abs(decomposition.plus.columns), [[1.0], [0.0]], atol=1e-12
        )
        np.testing.assert_allclose(
            np.abs(decomposition.minus.columns), [[0.0], [1.0]], atol=1e-12
        )

    def test_jordan_witness_not_stable(self):
        n = KreinOperator(np.array([[3 + 1j, 1.0], [0.0, 3 + 1j]]), KreinSpace(SWAP))
        stable, decomposition = strong_stability_check(n)
        assert not stable
        assert decomposition is None

    def test_hilbert_space_always_stable(self):
        rng = np.random.default_rng(51)
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        n = KreinOperator(a + a.conj().T, KreinSpace.euclidean(4))
        stable, decomposition = strong_stability_check(n)
        assert stable
        assert decomposition.minus.k == 0
        assert decomposition.plus.k == 4

    def test_invariant_under_isometric_conjugation(self):
        rng = np.random.default_rng(52)
        for _ in range(8):
            spec = sample_generator_spec(rng, 6, cond_bound=None)
            base = build_normal_with_types(spec)
            conj = build_normal_with_types(
                GeneratorSpec(
                    signature=spec.signature,
                    positive_type_eigs=spec.positive_type_eigs,
                    negative_type_eigs=spec.negative_type_eigs,
                    neutral_pairs=spec.neutral_pairs,
                    neutral_jordan=spec.neutral_jordan,
                    cond_bound=1e3,
                    seed=spec.seed,
                )
            )
            assert (
                strong_stability_check(base.operator)[0]
                == strong_stability_check(conj.operator)[0]
            )


class TestStructuredPerturbation:
    def test_small_perturbations_preserve_stability(self):
        rng = np.random.default_rng(53)
        checked = 0
        for trial in range(20):
            spec = sample_generator_spec(
                rng, 6, kinds=("positive", "negative"), cond_bound=1e3
            )
            gen = build_normal_with_types(spec)
            stable, _ = strong_stability_check(gen.operator)
            assert stable
            margin = classification_margin(gen)
            perturbed = perturb_structured(gen, 0.45 * margin, seed=trial)
            assert np.linalg.norm(
                perturbed.operator.matrix - gen.operator.matrix, 2
            ) <= 0.45 * margin + 1e-12
            still_stable, _ = strong_stability_check(perturbed.operator)
            assert still_stable
            checked += 1
        assert checked == 20

    def test_neutral_jordan_point_survives_structured_family(self):
        spec = GeneratorSpec(signature=(1, 1), neutral_jordan=(3 + 1j,), seed=5)
        gen = build_normal_with_types(spec)
        for trial in range(5):
            perturbed = perturb_structured(gen, 0.3, seed=trial)
            points = classified_spectrum(perturbed.operator)
            assert any(pt.type_tag is SpectralType.NEUTRAL for pt in points)
            stable, _ = strong_stability_check(perturbed.operator)
            assert not stable
