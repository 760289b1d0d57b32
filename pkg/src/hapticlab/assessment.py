"""Normalized learning gain over pre/post test-score tables.

gain = (post - pre) / (100 - pre). A student at the pre-test ceiling has no
headroom, so their gain is undefined; batch runs exclude and report such
rows instead of failing outright.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from statistics import fmean
from typing import Iterable, Union


class UndefinedGainError(ValueError):
    """Pre-test score of 100 leaves no headroom; the gain is undefined."""


class EmptyGroupError(ValueError):
    pass


class ScoreParseError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class ScoreRecord:
    student: str
    group: str
    test2: float   # pre-lab score, percent
    test3: float   # post-lab score, percent

    def __post_init__(self):
        if not (0.0 <= self.test2 <= 100.0 and 0.0 <= self.test3 <= 100.0):
            raise ValueError(f"scores must be in [0, 100]: {self}")


@dataclass
class GainReport:
    group: str
    n: int
    mean_gain: float
    gains: list[float]
    excluded: list[str] = field(default_factory=list)  # ceiling students, reported not dropped
    aggregation: str = "per-student"


def normalized_gain(test2: float, test3: float) -> float:
    if not (0.0 <= test2 <= 100.0 and 0.0 <= test3 <= 100.0):
        raise ValueError(f"scores must be in [0, 100], got test2={test2} test3={test3}")
    if test2 == 100.0:
        raise UndefinedGainError("pre-test at ceiling (100): gain undefined")
    # evaluated as 1 - (100-post)/(100-pre): algebraically (post-pre)/(100-pre),
    # but the bound <= 1 and "== 1 iff post == 100" hold exactly in floats
    return 1.0 - (100.0 - test3) / (100.0 - test2)


def group_gain(records: Iterable[ScoreRecord], aggregation: str = "per-student") -> dict[str, GainReport]:
    """Per-group reports. "per-student" averages individual gains (the default);
    "group-mean" applies the gain formula to the group's mean scores."""
    if aggregation not in ("per-student", "group-mean"):
        raise ValueError(f"unknown aggregation {aggregation!r}")
    groups: dict[str, list[ScoreRecord]] = {}
    for rec in records:
        groups.setdefault(rec.group, []).append(rec)
    if not groups:
        raise EmptyGroupError("no records")

    out: dict[str, GainReport] = {}
    for name in sorted(groups):
        members = groups[name]
        usable = [r for r in members if r.test2 < 100.0]
        excluded = [r.student for r in members if r.test2 == 100.0]
        if aggregation == "per-student":
            if not usable:
                raise EmptyGroupError(f"group {name!r} has no students below the ceiling")
            gains = [normalized_gain(r.test2, r.test3) for r in usable]
            mean = fmean(gains)
        else:
            mean2 = fmean([r.test2 for r in members])
            mean3 = fmean([r.test3 for r in members])
            mean = normalized_gain(mean2, mean3)
            gains = []
        out[name] = GainReport(group=name, n=len(usable) if aggregation == "per-student" else len(members),
                               mean_gain=mean, gains=gains, excluded=excluded,
                               aggregation=aggregation)
    return out


EXPECTED_HEADER = ["student", "group", "test2", "test3"]


def load_scores(source: Union[str, io.TextIOBase]) -> list[ScoreRecord]:
    """Parse `student,group,test2,test3` CSV; reject the whole file on any bad row."""
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return load_scores(fh)

    reader = csv.reader(source)
    problems: list[str] = []
    records: list[ScoreRecord] = []
    header = next(reader, None)
    if header is None:
        raise ScoreParseError(["empty input: no header row"])
    if [h.strip() for h in header] != EXPECTED_HEADER:
        raise ScoreParseError([f"line 1: header must be {','.join(EXPECTED_HEADER)}, got {','.join(header)}"])

    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            problems.append(f"line {lineno}: expected 4 fields, got {len(row)}")
            continue
        student, group = row[0].strip(), row[1].strip()
        try:
            test2, test3 = float(row[2]), float(row[3])
        except ValueError:
            problems.append(f"line {lineno}: test scores must be numeric: {row[2]!r}, {row[3]!r}")
            continue
        try:
            records.append(ScoreRecord(student=student, group=group, test2=test2, test3=test3))
        except ValueError as exc:
            problems.append(f"line {lineno}: {exc}")

    if problems:
        raise ScoreParseError(problems)
    if not records:
        raise ScoreParseError(["no data rows"])
    return records
