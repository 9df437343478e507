import math

import numpy as np
import pytest

from fredk2 import InputError, InvariantViolation, NumericalError
from fredk2.fourier_loops import FourierLoop, pairing_integral
from fredk2.toeplitz_calculus import (
    HankelWindow,
    ToeplitzOp,
    coshift_op,
    commutator,
    commutator_trace_closed,
    exp_op,
    identity_op,
    op_trace,
    schatten2_commutator_F,
    shift_conjugation_trace,
    shift_op,
    toeplitz,
    toeplitz_matrix,
)


def random_loop(rng, band=8, scale=0.3):
    return FourierLoop({k: scale * (rng.standard_normal() + 1j * rng.standard_normal())
                        for k in range(-band, band + 1)})


class TestConstruction:
    def test_shift(self):
        s = shift_op(8)
        m = s.dense_section(4)
        expected = np.diag(np.ones(3), -1)
        assert np.allclose(m, expected)

    def test_identity(self):
        assert np.allclose(identity_op(8).dense_section(4), np.eye(4))

    def test_coshift(self):
        m = coshift_op(8).dense_section(4)
        assert np.allclose(m, np.diag(np.ones(3), 1))

    def test_window_must_dominate_band(self):
        with pytest.raises(InputError, match="window must dominate band"):
            toeplitz(FourierLoop({4: 1.0}), 8)

    def test_hankel_entries(self):
        h = HankelWindow(FourierLoop({1: 1.0, 3: 2.0}), 4).matrix
        expected = np.zeros((4, 4), dtype=complex)
        expected[0, 0] = 1.0
        expected[0, 2] = expected[1, 1] = expected[2, 0] = 2.0
        assert np.array_equal(h, expected)


class TestMul:
    def test_s_sstar(self):
        # S·S* = 1 − e₀⊗e₀; oracle: dense 64×64 matrix product
        w = 16
        prod = shift_op(w).mul(coshift_op(w))
        assert prod.symbol.coeffs == {0: 1.0 + 0j}
        expected = np.zeros((w, w), dtype=complex)
        expected[0, 0] = -1.0
        assert np.allclose(prod.correction, expected, atol=1e-15)

        n = 64
        s = np.diag(np.ones(n - 1), -1)
        dense = s @ s.T.conj()
        assert np.allclose(prod.dense_section(n)[:16, :16], dense[:16, :16])

    def test_sstar_s(self):
        prod = coshift_op(16).mul(shift_op(16))
        assert prod.symbol.coeffs == {0: 1.0 + 0j}
        assert np.abs(prod.correction).max() == 0.0

    def test_hankel_correction(self):
        a = FourierLoop({1: 0.3})
        b = FourierLoop({-1: 0.2})
        prod = toeplitz(a, 16).mul(toeplitz(b, 16))
        assert prod.symbol.coeffs == {0: 0.3 * 0.2}
        ha = HankelWindow(a, 16).matrix
        hbt = HankelWindow(b.reflect(), 16).matrix
        assert np.allclose(prod.correction, -(ha @ hbt))

    def test_dense_oracle_interior(self):
        # finite-section product agrees with the operator product away
        # from the truncation boundary
        rng = np.random.default_rng(23)
        a, b = random_loop(rng, band=4), random_loop(rng, band=4)
        x = toeplitz(a, 32).mul(toeplitz(b, 32))
        n = 64
        dense = toeplitz_matrix(a, n) @ toeplitz_matrix(b, n)
        inner = n - 2 * 4
        assert np.abs(x.dense_section(n)[:inner, :inner]
                      - dense[:inner, :inner]).max() < 1e-12

    def test_symbol_map_exact(self):
        rng = np.random.default_rng(29)
        for _ in range(5):
            a, b = random_loop(rng), random_loop(rng)
            prod = toeplitz(a, 64).mul(toeplitz(b, 64))
            assert prod.symbol.coeffs == a.mul(b).coeffs

    def test_commutator_symbol_exactly_zero(self):
        rng = np.random.default_rng(31)
        a, b = random_loop(rng), random_loop(rng)
        z = commutator(toeplitz(a, 64), toeplitz(b, 64))
        assert z.symbol.is_zero()


class TestTrace:
    def test_shift_commutator(self):
        c = commutator(shift_op(16), coshift_op(16))
        assert abs(op_trace(c) - (-1)) < 1e-14

    def test_zero(self):
        assert op_trace(ToeplitzOp(FourierLoop({}), None, 8)) == 0

    def test_nonzero_symbol_rejected(self):
        with pytest.raises(InvariantViolation, match="trace undefined"):
            op_trace(identity_op(8))

    def test_k_minus_one_term(self):
        a, b = FourierLoop({1: 1.0}), FourierLoop({-1: 1.0})
        c = commutator(toeplitz(a, 16), toeplitz(b, 16))
        assert abs(op_trace(c) - (-1)) < 1e-14

    def test_closed_form_matches_window_trace(self):
        rng = np.random.default_rng(37)
        for _ in range(5):
            a, b = random_loop(rng), random_loop(rng)
            c = commutator(toeplitz(a, 64), toeplitz(b, 64))
            assert abs(op_trace(c) - commutator_trace_closed(a, b)) < 1e-10

    def test_doubling_within_tail(self):
        rng = np.random.default_rng(41)
        a, b = random_loop(rng, band=4), random_loop(rng, band=4)
        x32 = toeplitz(a, 32).mul(toeplitz(b, 32))
        x64 = toeplitz(a, 64).mul(toeplitz(b, 64))
        t32 = np.trace(x32.correction)
        t64 = np.trace(x64.correction)
        assert abs(t64 - t32) <= x32.tail_bound + 1e-13


class TestClosedForms:
    def test_commutator_trace_closed(self):
        a, b = FourierLoop({2: 0.5}), FourierLoop({-2: 0.4})
        assert abs(commutator_trace_closed(a, b) - (-0.4)) < 1e-15
        assert commutator_trace_closed(a, a) == 0

    def test_closed_matches_pairing(self):
        rng = np.random.default_rng(43)
        a, b = random_loop(rng), random_loop(rng)
        assert commutator_trace_closed(a, b) == pairing_integral(a, b)

    def test_shift_conjugation(self):
        assert shift_conjugation_trace(FourierLoop({0: 1.0})) == -1
        assert shift_conjugation_trace(FourierLoop({3: 7.0})) == 0
        assert shift_conjugation_trace(FourierLoop({0: 2 + 1j, 1: 5.0})) == -(2 + 1j)

    def test_shift_conjugation_window_oracle(self):
        # dense window trace of S·T_b·S* − T_b
        rng = np.random.default_rng(47)
        b = random_loop(rng, band=6)
        n = 64
        s = np.diag(np.ones(n - 1), -1).astype(complex)
        tb = toeplitz_matrix(b, n)
        diff = s @ tb @ s.conj().T - tb
        assert abs(np.trace(diff) - shift_conjugation_trace(b)) < 1e-12

    def test_schatten2(self):
        assert schatten2_commutator_F(FourierLoop({0: 5.0})) == 0
        assert abs(schatten2_commutator_F(FourierLoop({1: 1.0})) - 2) < 1e-15
        assert abs(schatten2_commutator_F(FourierLoop({1: 1.0, -1: 1.0}))
                   - 2 * math.sqrt(2)) < 1e-15

    def test_schatten2_double_sum_oracle(self):
        # [F, π(f)] on ℓ²(ℤ) has entries 2f_{j−k}(χ(j)−χ(k))/... with
        # HS norm² = 4·Σ_{j≥0>k} |f_{j−k}|² + 4·Σ_{j<0≤k} |f_{j−k}|²,
        # truncated far beyond the band
        rng = np.random.default_rng(53)
        f = random_loop(rng, band=5)
        total = 0.0
        rng_idx = range(-40, 40)
        for j in rng_idx:
            for k in rng_idx:
                if (j >= 0) != (k >= 0):
                    total += 4 * abs(f[j - k]) ** 2
        assert abs(math.sqrt(total) - schatten2_commutator_F(f)) < 1e-12


class TestInvExp:
    def test_inv_identity(self):
        y = identity_op(16).inv()
        assert y.symbol.coeffs == {0: 1.0 + 0j}
        assert np.abs(y.correction).max() < 1e-12

    def test_inv_scalar(self):
        y = toeplitz(FourierLoop({0: 2.0}), 16).inv()
        assert abs(y.symbol[0] - 0.5) < 1e-14
        assert np.abs(y.correction).max() < 1e-12

    def test_inv_winding_obstruction(self):
        with pytest.raises(NumericalError, match="index obstruction"):
            shift_op(16).inv()

    def test_inv_residual(self):
        rng = np.random.default_rng(59)
        a = random_loop(rng, band=3, scale=0.2)
        x = exp_op(toeplitz(a, 64))
        y = x.inv()
        resid = x.mul(y).sub(identity_op(64))
        assert resid.symbol.l1() < 1e-12
        assert np.abs(resid.correction).max() < 1e-10
        resid2 = y.mul(x).sub(identity_op(64))
        assert np.abs(resid2.correction).max() < 1e-10

    def test_inv_matches_exp_neg(self):
        rng = np.random.default_rng(61)
        a = random_loop(rng, band=3, scale=0.15)
        x = exp_op(toeplitz(a, 64))
        direct = exp_op(toeplitz(a.neg(), 64))
        resid = x.mul(direct).sub(identity_op(64))
        assert np.abs(resid.correction).max() < 1e-10

    def test_exp_zero(self):
        e = exp_op(ToeplitzOp(FourierLoop({}), None, 16))
        assert e.symbol.coeffs == {0: 1.0 + 0j}
        assert np.abs(e.correction).max() < 1e-13

    def test_exp_scalar(self):
        e = exp_op(toeplitz(FourierLoop({0: 0.3 + 0.1j}), 16))
        assert abs(e.symbol[0] - np.exp(0.3 + 0.1j)) < 1e-14
        assert np.abs(e.correction).max() < 1e-13

    def test_exp_symbol_is_exp(self):
        a = FourierLoop({1: 0.3, -2: 0.1})
        e = exp_op(toeplitz(a, 64))
        assert e.symbol.sub(a.exp()).l1() < 1e-14

    def test_exp_dense_oracle(self):
        # compare against the dense matrix exponential of a larger
        # section on its top-left corner
        import scipy.linalg
        a = FourierLoop({1: 0.3, -2: 0.1})
        e = exp_op(toeplitz(a, 64))
        dense = scipy.linalg.expm(toeplitz_matrix(a, 256))
        assert np.abs(e.dense_section(64) - dense[:64, :64]).max() < 1e-12

    def test_exp_self_consistency(self):
        rng = np.random.default_rng(67)
        a = random_loop(rng, band=4, scale=0.25)
        x = toeplitz(a, 64)
        prod = exp_op(x).mul(exp_op(x.neg()))
        dev = prod.dense_section(64) - np.eye(64)
        assert np.abs(dev).max() < 1e-10


class TestSerialization:
    def test_dump_roundtrip_fields(self):
        x = shift_op(8).mul(coshift_op(8))
        doc = x.to_json()
        assert doc["window"] == 8
        assert len(doc["correction"]) == 64
        assert doc["tail_bound"] >= 0
        assert doc["symbol"]["coeffs"] == [[0, 1.0, 0.0]]
