"""Parsers for angle literals (``pi/8``), sweep ranges and SI quantities."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

_PI_RE = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?P<coef>\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$",
    re.IGNORECASE,
)


def parse_angle(text: str) -> float:
    """``"pi/2"``, ``"0.2pi"``, ``"2*pi/5"``, ``"-pi/8"`` or a plain number."""
    m = _PI_RE.match(text)
    if not m:
        try:
            return float(text)
        except ValueError:
            raise ValueError(f"cannot parse angle {text!r}") from None
    coef = Fraction(m["coef"]) if m["coef"] else Fraction(1)
    if m["den"]:
        coef /= Fraction(m["den"])
    if m["sign"] == "-":
        coef = -coef
    return float(coef) * math.pi


def parse_angle_list(text: str) -> list[float]:
    return [parse_angle(t) for t in text.split(",") if t.strip()]


def parse_number_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


@dataclass(frozen=True)
class SweepRange:
    start: float
    stop: float
    count: int


def parse_sweep(text: str, angle: bool = False) -> SweepRange:
    """``"from:to:count"``; endpoints may be angle literals when ``angle``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"sweep must look like from:to:count, got {text!r}")
    conv = parse_angle if angle else float
    start, stop = conv(parts[0]), conv(parts[1])
    count = int(parts[2])
    if count < 2 or not start < stop:
        raise ValueError(f"invalid sweep range {text!r}")
    return SweepRange(start, stop, count)


_PREFIX = {
    "": Fraction(1), "k": Fraction(10**3), "M": Fraction(10**6), "G": Fraction(10**9), "T": Fraction(10**12),
    "m": Fraction(1, 10**3), "u": Fraction(1, 10**6), "µ": Fraction(1, 10**6), "n": Fraction(1, 10**9),
    "p": Fraction(1, 10**12), "f": Fraction(1, 10**15), "c": Fraction(1, 100),
}
_UNITS = ("Hz", "F/m", "H/m", "A", "F", "H", "J", "m", "s")
_QTY_RE = re.compile(
    r"^\s*(?P<pre2pi>(?P<fac>\d+(?:\.\d*)?)?\s*\*?\s*pi\s*\*\s*)?(?P<num>[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)\s*(?P<unit>\S*)\s*$"
)


@dataclass(frozen=True)
class Quantity:
    """``coefficient * pi**pi_power`` in SI base units, kept exact."""

    coefficient: Fraction
    pi_power: int
    unit: str

    def __float__(self):
        return float(self.coefficient) * math.pi**self.pi_power


def parse_quantity(text: str, expect: tuple[str, ...] = ()) -> Quantity:
    """Parse ``"4.8GHz"``, ``"2pi*4.8GHz"``, ``"44 MHz"``, ``"1uA"``, ``"0.8"``.

    ``expect`` lists acceptable base units; a bare number is accepted as
    already being in SI.
    """
    m = _QTY_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse quantity {text!r}")
    coef = Fraction(m["num"])
    pi_power = 0
    if m["pre2pi"]:
        coef *= Fraction(m["fac"]) if m["fac"] else 1
        pi_power = 1
    unit = m["unit"]
    base = ""
    if unit:
        for u in _UNITS:
            if unit.endswith(u) and unit[: -len(u)] in _PREFIX:
                base = u
                coef *= _PREFIX[unit[: -len(u)]]
                break
        else:
            raise ValueError(f"unknown unit {unit!r} in {text!r}")
    if expect and base and base not in expect:
        raise ValueError(f"expected a quantity in {'/'.join(expect)}, got {text!r}")
    return Quantity(coef, pi_power, base)


def quantity_value(text: str, expect: tuple[str, ...] = ()) -> float:
    return float(parse_quantity(text, expect))
