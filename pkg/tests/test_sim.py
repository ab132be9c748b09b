"""Exact time-domain simulation against the algebraic closed loop."""

from fractions import Fraction

import pytest

from stabring.matrixring import Mat
from stabring.poly import parse_poly
from stabring.ring import PolyFraction
from stabring.sim import (AlgebraicLoopSingularError, NotCausalTFError,
                          SimulationUnsupportedError, compare_to_H,
                          impulse_response, simulate_loop, trace_to_csv)
from stabring.synth import closed_loop

Z = ("z",)


def zp(text):
    return parse_poly(text, Z)


def frac(num, den="1"):
    return PolyFraction(zp(num), zp(den))


class TestImpulseResponse:
    def test_reduced_rational(self):
        # synthetic long division of (1+z+z^2)/(1+z)
        out = impulse_response(frac("1 - z^3", "1 - z^2"), 6)
        assert out == [1, 0, 1, -1, 1, -1]

    def test_polynomial(self):
        assert impulse_response(frac("1 + z^2"), 5) == [1, 0, 1, 0, 0]

    def test_constant(self):
        assert impulse_response(frac("1"), 4) == [1, 0, 0, 0]

    def test_convolution_oracle(self):
        # series of a product equals the convolution of the series
        a = frac("1", "1 - z^2")
        b = frac("1 + z", "1 - 3*z")
        sa = impulse_response(a, 12)
        sb = impulse_response(b, 12)
        sab = impulse_response(a * b, 12)
        conv = [sum(sa[k] * sb[t - k] for k in range(t + 1)) for t in range(12)]
        assert sab == conv

    def test_not_causal(self):
        with pytest.raises(NotCausalTFError):
            impulse_response(frac("1", "z^2"), 3)


class TestSimulateLoop:
    def test_open_loop_passthrough(self):
        P = Mat.from_rows([[frac("0")]])
        C = Mat.from_rows([[frac("0")]])
        trace = simulate_loop(P, C, [[Fraction(1)]], [[]], 5)
        assert trace.e1[0] == [1, 0, 0, 0, 0]
        assert trace.e2[0] == [0] * 5
        assert trace.y1[0] == [0] * 5
        assert trace.y2[0] == [0] * 5

    def test_loop_equations_hold(self, delay_plant, delay_controller):
        trace = simulate_loop(delay_plant.P, delay_controller.C,
                              [[Fraction(1), Fraction(0), Fraction(2)], []],
                              [[Fraction(1, 3)]], 12)
        for t in range(12):
            for i in range(2):
                assert trace.e1[i][t] == trace.u1[i][t] - trace.y2[i][t]
            assert trace.e2[0][t] == trace.u2[0][t] + trace.y1[0][t]

    def test_finite_support_over_delay_ring(self, delay_plant, delay_controller):
        trace = simulate_loop(delay_plant.P, delay_controller.C,
                              [[Fraction(1)], []], [[]], 40)
        for ch in trace.e1 + trace.e2:
            assert ch[1] == 0          # no unit-delay tap in the ring
            assert all(v == 0 for v in ch[30:])   # stable responses terminate

    def test_algebraic_loop_singular(self, ring23):
        P = Mat.from_rows([[frac("1")]])
        C = Mat.from_rows([[frac("-1")]])
        with pytest.raises(AlgebraicLoopSingularError):
            simulate_loop(P, C, [[Fraction(1)]], [[]], 3)

    def test_multivariate_rejected(self, xy_plant):
        C = Mat.from_rows([[PolyFraction(
            parse_poly("0", ("x", "y")), parse_poly("1", ("x", "y")))]])
        with pytest.raises(SimulationUnsupportedError):
            simulate_loop(xy_plant.P, C, [[Fraction(1)]], [[]], 3)


class TestCompareToH:
    def test_delay_plant(self, delay_plant, delay_controller):
        assert compare_to_H(delay_plant.P, delay_controller.C, 50)

    def test_siso_pipeline(self, siso_plant, siso_controller):
        assert compare_to_H(siso_plant.P, siso_controller.C, 50)

    def test_identity_loop(self):
        P = Mat.from_rows([[frac("0")]])
        C = Mat.from_rows([[frac("0")]])
        assert compare_to_H(P, C, 10)

    def test_corrupted_controller_detected(self, delay_plant, delay_controller):
        # perturb one coefficient; the trace must no longer match the
        # closed-loop map of the original pair
        C = delay_controller.C
        num = C[0, 0].num + zp("1/977*z^2")
        entries = list(C.entries)
        entries[0] = PolyFraction(num, C[0, 0].den)
        corrupted = Mat(C.rows, C.cols, entries)
        reference = closed_loop(delay_plant.P, C)
        assert compare_to_H(delay_plant.P, C, 50, against=reference)
        assert not compare_to_H(delay_plant.P, corrupted, 50, against=reference)

    def test_matches_convolution_with_h(self, siso_plant, siso_controller):
        # time-domain trace equals convolution with the closed-loop series
        H = closed_loop(siso_plant.P, siso_controller.C)
        u = [Fraction(1), Fraction(2), Fraction(-1)]
        trace = simulate_loop(siso_plant.P, siso_controller.C, [list(u)], [[]], 15)
        h_series = impulse_response(H[0, 0], 15)
        expected = [sum(h_series[k] * (u[t - k] if t - k < len(u) else Fraction(0))
                        for k in range(t + 1)) for t in range(15)]
        assert trace.e1[0] == expected


class TestCsv:
    def test_header_and_rationals(self):
        P = Mat.from_rows([[frac("z^2", "1 - z^2")]])
        C = Mat.from_rows([[frac("1")]])
        trace = simulate_loop(P, C, [[Fraction(1, 2)]], [[]], 3)
        text = trace_to_csv(trace)
        lines = text.strip().split("\n")
        assert lines[0] == "step,u1_1,u2_1,e1_1,e2_1,y1_1,y2_1"
        assert lines[1].startswith("0,1/2,")
        assert len(lines) == 4
