"""Python bindings for the pabias amplifier bias-switching toolkit."""

from ._core import (
    BiasPoint,
    PabiasError,
    PaParams,
    PaStats,
    am_am,
    calibrate_reference,
    classify,
    conduction_currents,
    decode_frame,
    efficiency_curve,
    encode_set_voltage,
    find_p1db,
    gate_step_for,
    generate,
    measure_imd,
    psu_step,
    simulate,
    sweep_bias,
    track_drain,
)

__all__ = [
    "BiasPoint",
    "PabiasError",
    "PaParams",
    "PaStats",
    "am_am",
    "calibrate_reference",
    "classify",
    "conduction_currents",
    "decode_frame",
    "efficiency_curve",
    "encode_set_voltage",
    "find_p1db",
    "gate_step_for",
    "generate",
    "measure_imd",
    "psu_step",
    "simulate",
    "sweep_bias",
    "track_drain",
]
