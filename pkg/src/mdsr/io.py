"""Spectrum CSV I/O: `detuning_mhz,transmission`, LF endings, 17 significant digits."""

from __future__ import annotations

import numpy as np

from .spectrum import Spectrum

HEADER = "detuning_mhz,transmission"


class SpectrumFormatError(ValueError):
    pass


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_spectrum(spectrum: Spectrum, path) -> None:
    lines = [HEADER]
    for d, t in zip(spectrum.detunings, spectrum.transmission):
        lines.append(f"{format_float(d)},{format_float(t)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_spectrum(path) -> Spectrum:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise SpectrumFormatError(f"missing header {HEADER!r}")
    detunings, transmission = [], []
    for row_number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise SpectrumFormatError(f"row {row_number}: expected 2 fields, got {len(parts)}")
        try:
            d, t = float(parts[0]), float(parts[1])
        except ValueError:
            raise SpectrumFormatError(f"row {row_number}: malformed number") from None
        if not 0.0 <= t <= 1.0:
            raise SpectrumFormatError(f"row {row_number}: transmission {t} outside [0, 1]")
        detunings.append(d)
        transmission.append(t)
    det = np.array(detunings)
    if det.size > 1 and not np.all(np.diff(det) > 0):
        raise SpectrumFormatError("detunings are not strictly increasing")
    return Spectrum(det, np.array(transmission))
