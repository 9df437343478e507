"""Toeplitz operators with trace-class bookkeeping.

An element of the extension algebra E = {T_φ + trace class} is stored as

    symbol φ   (a FourierLoop; T_φ has matrix (φ_{j−k})_{j,k≥0})
    correction C   (dense M×M window, the trace-class part)
    tail_bound     (bound on the trace norm of whatever fell off the window)

Bare truncated matrices are never used as operator models: the trace of a
commutator of finite matrices is identically zero, so finite sections
cannot see any of the invariants computed downstream.  All structure
lives in the symbol/correction split.

Products follow the Brown–Halmos identity

    T_φ T_ψ = T_{φψ} − H_φ H_{ψ̃},    ψ̃(z) = ψ(1/z),

with the Hankel matrix H_φ = (φ_{j+k+1})_{j,k≥0}, which is supported in a
band×band corner for band-limited symbols.  Symbol arithmetic is exact
(fsum-canonical), so the symbol map is an algebra homomorphism on the
nose and commutators have exactly zero symbol.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from ._errors import InputError, InvariantViolation, NumericalError
from .fourier_loops import FourierLoop, pairing_integral, winding_number, zero_loop

DEFAULT_WINDOW = 256


def toeplitz_matrix(symbol: FourierLoop, rows: int, cols: int | None = None) -> np.ndarray:
    """Dense section (φ_{j−k}), j < rows, k < cols."""
    if cols is None:
        cols = rows
    out = np.zeros((rows, cols), dtype=complex)
    for k, c in symbol.coeffs.items():
        idx = np.arange(max(0, k), min(rows, cols + k))
        out[idx, idx - k] = c
    return out


class HankelWindow:
    """Dense window of the Hankel matrix (φ_{j+k+1})_{j,k≥0}."""

    __slots__ = ("matrix",)

    def __init__(self, symbol: FourierLoop, window: int):
        h = np.zeros((window, window), dtype=complex)
        for k, c in symbol.coeffs.items():
            if k >= 1:
                # anti-diagonal j + l = k - 1
                idx = np.arange(0, min(k, window))
                sel = idx[k - 1 - idx < window]
                h[sel, k - 1 - sel] = c
        self.matrix = h


def _nuclear_est(block: np.ndarray) -> float:
    """Cheap upper bound ‖·‖₁ ≤ sqrt(rank)·‖·‖_F."""
    if block.size == 0:
        return 0.0
    r = min(np.count_nonzero(np.abs(block).sum(axis=1)),
            np.count_nonzero(np.abs(block).sum(axis=0)))
    return math.sqrt(max(r, 0)) * float(np.linalg.norm(block))


def _interior_spill_est(corr: np.ndarray, window: int, inner: int) -> float:
    """Estimate the trace norm of correction content outside the kept
    window, using only the interior of the computed section: the outer
    strip of a finite-section computation is boundary pollution, not
    operator content.  Doubled as a margin for the unsampled remainder."""
    inner = min(inner, corr.shape[0])
    block = corr[:inner, :inner].copy()
    w = min(window, inner)
    block[:w, :w] = 0
    return 2.0 * _nuclear_est(block)


class ToeplitzOp:
    """T_φ + C with C supported (up to tail_bound) in an M×M window."""

    __slots__ = ("symbol", "correction", "window", "tail_bound")

    def __init__(self, symbol: FourierLoop, correction: np.ndarray | None = None,
                 window: int = DEFAULT_WINDOW, tail_bound: float = 0.0):
        self.symbol = symbol
        self.window = int(window)
        if correction is None:
            correction = np.zeros((self.window, self.window), dtype=complex)
        correction = np.asarray(correction, dtype=complex)
        if correction.shape != (self.window, self.window):
            raise InputError("correction window shape mismatch")
        self.correction = correction
        self.tail_bound = float(tail_bound)

    # -- structure -------------------------------------------------------

    def dense_section(self, n: int) -> np.ndarray:
        """Dense n×n section of T_φ + C."""
        out = toeplitz_matrix(self.symbol, n)
        m = min(n, self.window)
        out[:m, :m] += self.correction[:m, :m]
        return out

    def resized(self, window: int) -> "ToeplitzOp":
        if window == self.window:
            return self
        out = np.zeros((window, window), dtype=complex)
        m = min(window, self.window)
        out[:m, :m] = self.correction[:m, :m]
        tail = self.tail_bound
        if window < self.window:
            spill = self.correction.copy()
            spill[:window, :window] = 0
            tail += _nuclear_est(spill)
        return ToeplitzOp(self.symbol, out, window, tail)

    def op_norm_est(self) -> float:
        # Frobenius bounds the spectral norm; cheap and an honest over-estimate
        return (self.symbol.l1() + self.symbol.tail
                + float(np.linalg.norm(self.correction)) + self.tail_bound)

    # -- linear ops --------------------------------------------------------

    def add(self, other: "ToeplitzOp") -> "ToeplitzOp":
        w = max(self.window, other.window)
        a, b = self.resized(w), other.resized(w)
        return ToeplitzOp(a.symbol.add(b.symbol), a.correction + b.correction,
                          w, a.tail_bound + b.tail_bound)

    def sub(self, other: "ToeplitzOp") -> "ToeplitzOp":
        return self.add(other.neg())

    def neg(self) -> "ToeplitzOp":
        return ToeplitzOp(self.symbol.neg(), -self.correction, self.window,
                          self.tail_bound)

    def scalar_mul(self, s: complex) -> "ToeplitzOp":
        return ToeplitzOp(self.symbol.scalar_mul(s), complex(s) * self.correction,
                          self.window, abs(s) * self.tail_bound)

    # -- multiplication ----------------------------------------------------

    def mul(self, other: "ToeplitzOp") -> "ToeplitzOp":
        """Brown–Halmos product; correction exact on an extended window,
        then truncated back with the discarded mass bounded."""
        w = max(self.window, other.window)
        x, y = self.resized(w), other.resized(w)
        phi, psi = x.symbol, y.symbol
        band = max(phi.band, psi.band)
        ext = w + band

        corr = np.zeros((ext, ext), dtype=complex)
        hb = min(max(phi.band, psi.band, 1), ext)
        ha = HankelWindow(phi, hb).matrix
        hbt = HankelWindow(psi.reflect(), hb).matrix
        corr[:hb, :hb] -= ha @ hbt

        cx = np.zeros((ext, ext), dtype=complex)
        cx[:w, :w] = x.correction
        cy = np.zeros((ext, ext), dtype=complex)
        cy[:w, :w] = y.correction
        t_phi = toeplitz_matrix(phi, ext)
        t_psi = toeplitz_matrix(psi, ext)
        corr += t_phi @ cy + cx @ t_psi + cx @ cy

        spill = corr.copy()
        spill[:w, :w] = 0
        discarded = _nuclear_est(spill)
        tail = (x.tail_bound * y.op_norm_est() + x.op_norm_est() * y.tail_bound
                + discarded
                + phi.tail * _nuclear_est(y.correction)
                + _nuclear_est(x.correction) * psi.tail)
        return ToeplitzOp(phi.mul(psi), corr[:w, :w], w, tail)

    def inv(self) -> "ToeplitzOp":
        """Inverse in E (winding-zero nonvanishing symbol)."""
        if winding_number(self.symbol) != 0:
            raise NumericalError("not invertible in E: index obstruction")
        psi = self.symbol.inv()
        w = self.window
        n_check = w + self.symbol.band
        sec = self.dense_section(n_check)
        try:
            lu, piv = scipy.linalg.lu_factor(sec)
        except (scipy.linalg.LinAlgError, ValueError) as exc:
            raise NumericalError("numerically singular") from exc
        diag = np.abs(np.diag(lu))
        if diag.min() <= 1e-14 * max(diag.max(), 1.0):
            raise NumericalError("numerically singular")

        # invert on an enlarged section so the boundary layer of the
        # finite-section inverse stays outside the kept window
        big = 2 * w + 2 * max(self.symbol.band, psi.band)
        sec_big = self.dense_section(big)
        try:
            inv_big = np.linalg.inv(sec_big)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("numerically singular") from exc
        corr = inv_big - toeplitz_matrix(psi, big)
        tail = _interior_spill_est(corr, w, (w + big) // 2) \
            + self.tail_bound * float(np.linalg.norm(inv_big)) ** 2
        return ToeplitzOp(psi, corr[:w, :w], w, tail)

    def exp(self) -> "ToeplitzOp":
        """e^{T_φ + C} as symbol e^φ plus correction, via dense scaling
        and squaring on a quarantined section."""
        sym = self.symbol.exp()
        w = self.window
        quarantine = max(2 * sym.band, 32)
        big = w + quarantine
        exp_big = scipy.linalg.expm(self.dense_section(big))
        corr = exp_big - toeplitz_matrix(sym, big)
        tail = (_interior_spill_est(corr, w, w + quarantine // 2)
                + self.tail_bound * math.exp(self.op_norm_est()))
        return ToeplitzOp(sym, corr[:w, :w], w, tail)

    # -- trace ----------------------------------------------------------

    def op_trace(self) -> complex:
        if not self.symbol.is_zero():
            raise InvariantViolation("trace undefined: nonzero symbol part")
        return complex(np.trace(self.correction))

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        from .fourier_loops import loop_to_json
        flat = self.correction.reshape(-1)
        return {"symbol": loop_to_json(self.symbol),
                "window": self.window,
                "correction": [[v.real, v.imag] for v in flat],
                "tail_bound": self.tail_bound}


def toeplitz(a: FourierLoop, window: int = DEFAULT_WINDOW) -> ToeplitzOp:
    """T_a with zero correction."""
    if window < 2 * a.band + 2:
        raise InputError("window must dominate band")
    return ToeplitzOp(a, None, window, 0.0)


def identity_op(window: int = DEFAULT_WINDOW) -> ToeplitzOp:
    return ToeplitzOp(FourierLoop({0: 1.0}), None, window, 0.0)


def zero_op(window: int = DEFAULT_WINDOW) -> ToeplitzOp:
    return ToeplitzOp(zero_loop(), None, window, 0.0)


def shift_op(window: int = DEFAULT_WINDOW) -> ToeplitzOp:
    """S = T_z, the unilateral shift."""
    return toeplitz(FourierLoop({1: 1.0}), window)


def coshift_op(window: int = DEFAULT_WINDOW) -> ToeplitzOp:
    """S* = T_{z⁻¹}."""
    return toeplitz(FourierLoop({-1: 1.0}), window)


def mul(x: ToeplitzOp, y: ToeplitzOp) -> ToeplitzOp:
    return x.mul(y)


def inv(x: ToeplitzOp) -> ToeplitzOp:
    return x.inv()


def exp_op(x: ToeplitzOp) -> ToeplitzOp:
    return x.exp()


def op_trace(x: ToeplitzOp) -> complex:
    return x.op_trace()


def commutator(x: ToeplitzOp, y: ToeplitzOp) -> ToeplitzOp:
    return x.mul(y).sub(y.mul(x))


def commutator_trace_closed(a: FourierLoop, b: FourierLoop) -> complex:
    """Tr[T_a, T_b] = Σ_k k·a_{−k}·b_k."""
    return pairing_integral(a, b)


def shift_conjugation_trace(b: FourierLoop) -> complex:
    """Tr(S·T_b·S* − T_b) = −b₀."""
    return -b[0]


def schatten2_commutator_F(f: FourierLoop) -> float:
    """Hilbert–Schmidt norm of [F, π(f)] on the two-sided space,
    F = 2P − 1: equals sqrt(4·Σ_k |k|·|f_k|²)."""
    return math.sqrt(4 * math.fsum(abs(k) * abs(c) ** 2
                                   for k, c in f.coeffs.items()))
