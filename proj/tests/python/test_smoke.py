import math

import numpy as np
import pytest

import pabias


def test_generate_and_classify():
    cw = pabias.generate("cw", 1e6, 0.01)
    assert cw.dtype == np.complex128
    assert len(cw) == 10000
    assert np.allclose(np.abs(cw), 1.0)
    kind, papr, _ = pabias.classify(cw, 1e6, 0.01)
    assert kind == "Constant"
    assert papr == pytest.approx(0.0, abs=1e-9)

    tt = pabias.generate("two-tone", 1e6, 0.01)
    kind, papr, _ = pabias.classify(tt, 1e6, 0.01)
    assert kind == "Varying"
    assert papr == pytest.approx(3.0103, abs=0.02)


def test_conduction_and_efficiency():
    alpha, idc, i1 = pabias.conduction_currents(2.0, 1.0)
    assert alpha == pytest.approx(2 * math.pi)
    assert idc == pytest.approx(2.0)
    assert i1 == pytest.approx(1.0)
    curve = pabias.efficiency_curve([2 * math.pi, math.pi])
    assert curve[0][1] == pytest.approx(0.5)
    assert curve[1][1] == pytest.approx(math.pi / 4)


def test_simulate_and_imd():
    params = pabias.PaParams()
    params.g0 = 10.0
    params.vknee = 0.0
    params.smoothness = 2.0
    bias = pabias.BiasPoint(58.0, 2.0, 4)
    x = pabias.generate("two-tone", 1e6, 2**15 / 1e6, amplitude=5.8)
    y, stats = pabias.simulate(x, 1e6, bias, params)
    assert len(y) == len(x)
    assert stats.pdiss_w == pytest.approx(stats.pdc_w - stats.pout_w)
    imd = pabias.measure_imd(y, 1e6, -1e3, 1e3)
    assert -100 < imd[3] < -10


def test_calibration_and_sweep():
    params, residual = pabias.calibrate_reference(400)
    assert residual >= 0
    rows = pabias.sweep_bias([58.0, 48.0], 2.0, 1000.0, params)
    assert len(rows) == 2
    for r in rows:
        assert r["pout_w"] == pytest.approx(1000.0, rel=1e-3)
    assert rows[1]["eff_pct"] > rows[0]["eff_pct"]


def test_controller_helpers():
    assert pabias.track_drain(45.0, 0.1, 4.0) == pytest.approx(53.5)
    assert pabias.gate_step_for(0.75) == 1


def test_codec():
    wire = pabias.encode_set_voltage(48.0)
    assert len(wire) == 13
    assert wire[-4:] == bytes([0x00, 0x00, 0xBB, 0x80])
    assert pabias.decode_frame(wire) == ("set_voltage", 48000)
    set_v, actual_v, out = pabias.psu_step(48.0, 48.0, 0.1, [pabias.encode_set_voltage(60.0)])
    assert set_v == 58.0
    assert actual_v == pytest.approx(53.0)
    assert pabias.decode_frame(out[0]) == ("reply", 1, 58000)


def test_errors_surface_as_exceptions():
    with pytest.raises(pabias.PabiasError):
        pabias.conduction_currents(0.0, 1.0)
    with pytest.raises(pabias.PabiasError):
        pabias.decode_frame(b"\x00" * 12)
