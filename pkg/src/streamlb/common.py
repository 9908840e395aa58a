"""Shared primitives: verification reports, budget errors, bit-string encoding."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache


class BudgetError(RuntimeError):
    """An operation exceeded its configured enumeration or message budget."""


@dataclass(frozen=True)
class Report:
    """Outcome of a verification pass: ok plus the first violation found."""

    ok: bool
    reason: str | None = None
    detail: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def ok_report(**detail) -> Report:
    return Report(True, None, detail)


def fail_report(reason: str, **detail) -> Report:
    return Report(False, reason, detail)


# --- bit strings -----------------------------------------------------------
#
# Messages and serialized algorithm states are strings over {0,1}; space and
# communication are measured as their length.

def int_width(max_value: int) -> int:
    """Bits needed to write any integer in [0, max_value]."""
    if max_value < 0:
        raise ValueError("max_value must be nonnegative")
    return max(1, math.ceil(math.log2(max_value + 1))) if max_value > 0 else 0


@lru_cache(maxsize=4096)
def encode_int(value: int, width: int) -> str:
    if value < 0 or (width < value.bit_length()):
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width > 0 else ""


def decode_int(bits: str) -> int:
    return int(bits, 2) if bits else 0


def encode_ints(values, width: int) -> str:
    return "".join(encode_int(v, width) for v in values)


def decode_ints(bits: str, width: int) -> list[int]:
    if width == 0:
        return []
    if len(bits) % width:
        raise ValueError("bit string length is not a multiple of the field width")
    return [int(bits[i : i + width], 2) for i in range(0, len(bits), width)]
