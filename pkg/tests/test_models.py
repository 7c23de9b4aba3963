"""
Tests for the Lagrangian Grassmannian models and the product RSR.
"""

import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.matrix_core import frobenius_dist, random_unitary
from models.lagrangian_models import (
    AntiSympInvolution,
    LagrangianPlane,
    SymmetricUnitary,
    dump_point,
    first_slot_involution_check,
    involution_from_plane,
    involution_to_unitary,
    load_point,
    omega,
    plane_from_involution,
    point_from_json,
    point_to_json,
    random_lagrangian,
    standard_complex_structure,
    tau,
    theta0_involution,
    theta0_unitary,
    theta_involution,
    theta_unitary,
    unitary_to_involution,
)
from utils.errors import DimensionMismatchError, InvariantViolationError

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


class TestValidation:
    def test_identity_is_a_point(self):
        assert SymmetricUnitary(np.eye(3)).n == 3

    def test_non_symmetric_unitary_rejected(self, rng):
        u = random_unitary(3, rng)
        with pytest.raises(InvariantViolationError, match="A conj\\(A\\) = id"):
            SymmetricUnitary(u)

    def test_non_unitary_rejected(self):
        with pytest.raises(InvariantViolationError) as excinfo:
            SymmetricUnitary(2.0 * np.eye(2))
        assert excinfo.value.invariant.startswith("unitary")
        assert excinfo.value.deviation > 1.0

    def test_point_is_read_only_copy(self):
        source = np.eye(2, dtype=np.complex128)
        point = SymmetricUnitary(source)
        source[0, 0] = 5.0
        assert point.a[0, 0] == 1.0
        with pytest.raises(ValueError):
            point.a[0, 0] = 2.0

    def test_involution_invariants(self):
        assert AntiSympInvolution(tau(2)).n == 2
        with pytest.raises(InvariantViolationError, match="anti-symplectic"):
            AntiSympInvolution(np.eye(2))
        with pytest.raises(DimensionMismatchError):
            AntiSympInvolution(np.eye(3))

    def test_plane_invariants(self):
        frame = np.hstack([np.eye(2), np.zeros((2, 2))])
        assert_allclose(LagrangianPlane(frame).projector, np.diag([1.0, 1.0, 0.0, 0.0]))

        symplectic_pair = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
        with pytest.raises(InvariantViolationError, match="omega"):
            LagrangianPlane(symplectic_pair)

    def test_omega_is_standard(self):
        assert omega(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 1.0
        with pytest.raises(DimensionMismatchError):
            omega(np.ones(3), np.ones(3))

    def test_complex_structure_squares_to_minus_one(self):
        j = standard_complex_structure(3)
        assert_allclose(j @ j, -np.eye(6))


class TestThetaUnitary:
    def test_square_of_point_is_point(self, rng):
        a = random_lagrangian(3, rng)
        assert frobenius_dist(theta_unitary(a, a).a, a.a) < 1e-12

    def test_identity_first_slot_conjugates(self, rng):
        b = random_lagrangian(3, rng)
        assert_allclose(theta_unitary(SymmetricUnitary(np.eye(3)), b).a, b.a.conj())

    def test_scalar_case(self):
        a = SymmetricUnitary(np.array([[1j]]))
        b = SymmetricUnitary(np.array([[np.exp(1j * math.pi)]]))
        assert_allclose(theta0_unitary(a, b).a, [[1.0]], atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            theta_unitary(SymmetricUnitary(np.eye(2)), SymmetricUnitary(np.eye(3)))

    def test_closure_on_random_pairs(self, rng):
        for _ in range(100):
            a = random_lagrangian(4, rng)
            b = random_lagrangian(4, rng)
            theta_unitary(a, b)


class TestThetaInvolution:
    def test_square_of_point_is_point(self, rng):
        r = unitary_to_involution(random_lagrangian(2, rng))
        assert frobenius_dist(theta_involution(r, r).r, r.r) < 1e-12

    def test_conjugation_preserves_trace(self, rng):
        r = AntiSympInvolution(tau(3))
        s = unitary_to_involution(random_lagrangian(3, rng))
        assert np.trace(theta_involution(r, s).r) == pytest.approx(np.trace(s.r))

    def test_models_agree(self, rng):
        for _ in range(100):
            a = random_lagrangian(3, rng)
            b = random_lagrangian(3, rng)
            via_unitary = unitary_to_involution(theta_unitary(a, b)).r
            via_involution = theta0_involution(unitary_to_involution(a), unitary_to_involution(b)).r
            assert frobenius_dist(via_unitary, via_involution) < 1e-9


class TestConversions:
    def test_tau_is_identity(self):
        assert_allclose(involution_to_unitary(AntiSympInvolution(tau(3))).a, np.eye(3))

    def test_reflection_across_imaginary_axis(self):
        r = AntiSympInvolution(np.diag([-1.0, 1.0]))
        assert_allclose(involution_to_unitary(r).a, [[-1.0]])

    def test_identity_maps_to_tau(self):
        assert_allclose(unitary_to_involution(SymmetricUnitary(np.eye(2))).r, tau(2))

    def test_i_maps_to_swap(self):
        assert_allclose(unitary_to_involution(SymmetricUnitary(np.array([[1j]]))).r, SWAP)

    def test_round_trip(self, rng):
        for _ in range(100):
            a = random_lagrangian(3, rng)
            back = involution_to_unitary(unitary_to_involution(a))
            assert frobenius_dist(back.a, a.a) < 1e-10

    def test_plane_of_tau_is_real_subspace(self):
        plane = plane_from_involution(AntiSympInvolution(tau(2)))
        assert_allclose(plane.projector, np.diag([1.0, 1.0, 0.0, 0.0]), atol=1e-14)

    def test_plane_of_swap(self):
        plane = plane_from_involution(AntiSympInvolution(SWAP))
        assert_allclose(np.abs(plane.frame), [[1 / math.sqrt(2), 1 / math.sqrt(2)]])

    def test_involution_of_frames(self):
        frame = np.hstack([np.eye(2), np.zeros((2, 2))])
        assert_allclose(involution_from_plane(LagrangianPlane(frame)).r, tau(2))
        diagonal = np.array([[1.0, 1.0]]) / math.sqrt(2)
        assert_allclose(involution_from_plane(LagrangianPlane(diagonal)).r, SWAP, atol=1e-15)

    def test_plane_round_trip(self, rng):
        for _ in range(50):
            r = unitary_to_involution(random_lagrangian(3, rng))
            plane = plane_from_involution(r)
            again = plane_from_involution(involution_from_plane(plane))
            assert frobenius_dist(again.projector, plane.projector) < 1e-10


class TestRandomLagrangian:
    def test_reproducible(self):
        first = random_lagrangian(3, np.random.default_rng(11))
        second = random_lagrangian(3, np.random.default_rng(11))
        assert np.array_equal(first.a, second.a)

    def test_scalar_unit_modulus(self, rng):
        assert abs(abs(random_lagrangian(1, rng).a[0, 0]) - 1.0) < 1e-14


class TestFirstSlotInvolution:
    def test_identity_first_slot(self, rng):
        b = random_lagrangian(3, rng)
        assert first_slot_involution_check(SymmetricUnitary(np.eye(3)), b) < 1e-12

    def test_random_pair(self, rng):
        r0 = random_lagrangian(3, rng)
        s = random_lagrangian(3, rng)
        assert first_slot_involution_check(r0, s) < 1e-10

    def test_same_point(self, rng):
        a = random_lagrangian(3, rng)
        assert first_slot_involution_check(a, a) < 1e-12


class TestPointJson:
    def test_unitary_round_trip(self, rng, tmp_path):
        a = random_lagrangian(2, rng)
        path = tmp_path / "a.json"
        dump_point(a, path)
        loaded = load_point(path)
        assert isinstance(loaded, SymmetricUnitary)
        assert frobenius_dist(loaded.a, a.a) < 1e-15

    def test_involution_tag(self, rng):
        r = unitary_to_involution(random_lagrangian(2, rng))
        data = point_to_json(r)
        assert data["model"] == "involution"
        assert data["n"] == 2
        assert len(data["entries"]) == 4
        assert frobenius_dist(point_from_json(data).r, r.r) < 1e-15

    def test_unknown_model(self):
        with pytest.raises(InvariantViolationError, match="known model tag"):
            point_from_json({"model": "quaternion", "n": 1, "entries": [[1.0]]})

    def test_corrupted_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 2, "entries": [[1, 0]')
        with pytest.raises(json.JSONDecodeError):
            load_point(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_point(tmp_path / "missing.json")

    def test_invalid_invariant_in_file(self, tmp_path):
        path = tmp_path / "u.json"
        path.write_text(json.dumps({"n": 1, "entries": [[[2.0, 0.0]]]}))
        with pytest.raises(InvariantViolationError, match="unitary"):
            load_point(path)
