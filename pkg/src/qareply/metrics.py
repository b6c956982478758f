"""Measurement arithmetic: typing efficiency, prompt character counts,
and the unweighted workload average.

Character counts are Unicode code points, consistent with the anchor
offsets used everywhere else.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .domain import Condition, MetricsRecord
from .errors import NonPositiveDuration, OutOfRange, WrongArity

TLX_SCALES = 6
TLX_MIN, TLX_MAX = 1.0, 10.0

CSV_COLUMNS = (
    "condition",
    "final_char_count",
    "elapsed_seconds",
    "chars_per_second",
    "prompt_char_count",
)


@dataclass(frozen=True)
class EfficiencyReport:
    chars_per_second: float
    final_char_count: int
    elapsed_seconds: float


def efficiency(final_char_count: int, elapsed_seconds: float) -> float:
    """Characters contributed to the final reply per second of work."""
    if final_char_count < 0:
        raise OutOfRange("final_char_count must be >= 0")
    if elapsed_seconds <= 0:
        raise NonPositiveDuration("elapsed_seconds must be > 0")
    return final_char_count / elapsed_seconds


def efficiency_report(final_char_count: int, elapsed_seconds: float) -> EfficiencyReport:
    return EfficiencyReport(
        chars_per_second=efficiency(final_char_count, elapsed_seconds),
        final_char_count=final_char_count,
        elapsed_seconds=elapsed_seconds,
    )


def prompt_char_count(free_text_chars: int, added_option_texts: Sequence[str]) -> int:
    """Typed characters: the free-text field plus every user-added option."""
    if free_text_chars < 0:
        raise OutOfRange("free_text_chars must be >= 0")
    return free_text_chars + sum(len(t) for t in added_option_texts)


def raw_tlx(scores: Sequence[float]) -> float:
    """Simple average of the six workload subscale scores."""
    if len(scores) != TLX_SCALES:
        raise WrongArity(f"expected {TLX_SCALES} scores, got {len(scores)}")
    for s in scores:
        if not (TLX_MIN <= s <= TLX_MAX):
            raise OutOfRange(f"score {s} outside [{TLX_MIN}, {TLX_MAX}]")
    return sum(scores) / TLX_SCALES


def write_csv(records: Iterable[MetricsRecord], out) -> None:
    writer = csv.writer(out)
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.condition.value,
                r.final_char_count,
                r.elapsed_seconds,
                efficiency(r.final_char_count, r.elapsed_seconds),
                r.prompt_char_count,
            ]
        )


def records_to_csv(records: Iterable[MetricsRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def read_csv(text: str) -> list[MetricsRecord]:
    reader = csv.DictReader(io.StringIO(text))
    records = []
    for row in reader:
        records.append(
            MetricsRecord(
                final_char_count=int(row["final_char_count"]),
                elapsed_seconds=float(row["elapsed_seconds"]),
                prompt_char_count=int(row["prompt_char_count"]),
                condition=Condition(row["condition"]),
            )
        )
    return records


def per_condition_means(records: Sequence[MetricsRecord]) -> dict[str, dict[str, float]]:
    """Mean efficiency and prompt chars for each condition present."""
    grouped: dict[str, list[MetricsRecord]] = {}
    for r in records:
        grouped.setdefault(r.condition.value, []).append(r)
    out: dict[str, dict[str, float]] = {}
    for cond, rs in grouped.items():
        out[cond] = {
            "n": len(rs),
            "mean_efficiency": sum(
                efficiency(r.final_char_count, r.elapsed_seconds) for r in rs
            ) / len(rs),
            "mean_prompt_char_count": sum(r.prompt_char_count for r in rs) / len(rs),
        }
    return out
