"""Seeded stratified train / validation / test splits over labeled pixels.

Per-class counts use largest-remainder apportionment: the scene-wide target
for a role is ``floor(N * fraction)``; each class receives the floor of its
exact quota (at least one sample where the class is large enough) and the
leftover units go to the largest fractional remainders, ties broken by class
id. Pixels are shuffled per class with numpy's PCG64 generator so splits are
reproducible on any platform.
"""

import json
import logging
import math
import re
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import Optional

import numpy as np

from hybridsn_cli.data.cube import GroundTruthMap
from hybridsn_cli.errors import ConfigError, DataError

logger = logging.getLogger(__name__)

MIN_CLASS_SIZE_FOR_VALIDATION = 3


class Role(IntEnum):
    TRAIN = 0
    VALIDATION = 1
    TEST = 2


ROLE_CODES = {Role.TRAIN: "T", Role.VALIDATION: "V", Role.TEST: "X"}
CODE_ROLES = {code: role for role, code in ROLE_CODES.items()}


@dataclass(frozen=True)
class SplitAssignment:
    """Role of every labeled pixel, listed in row-major pixel order."""

    rows: np.ndarray
    cols: np.ndarray
    labels: np.ndarray
    roles: np.ndarray
    seed: int
    fractions: tuple[float, float]
    num_classes: int
    flagged_classes: list[int] = field(default_factory=list)

    def mask(self, role: Role) -> np.ndarray:
        return self.roles == role

    def coordinates(self, role: Role) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(rows, cols, labels)`` of the pixels holding ``role``."""
        selected = self.mask(role)
        return self.rows[selected], self.cols[selected], self.labels[selected]

    def counts(self, role: Role) -> np.ndarray:
        """Per-class counts for ``role``, index 0 = class 1."""
        return np.bincount(self.labels[self.mask(role)], minlength=self.num_classes + 1)[1:]

    def totals(self) -> tuple[int, int, int]:
        return tuple(int(self.mask(role).sum()) for role in Role)  # type: ignore[return-value]

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "fractions": list(self.fractions),
            "num_classes": self.num_classes,
            "labeled_pixels": int(self.roles.size),
            "flagged_classes": list(self.flagged_classes),
            "assignments": encode_roles(self.roles),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict, gt: GroundTruthMap) -> "SplitAssignment":
        rows, cols = np.nonzero(gt.labels)
        roles = decode_roles(data["assignments"])
        if roles.size != rows.size:
            raise DataError(f"Split covers {roles.size} pixels but the ground truth has {rows.size} labeled pixels")

        return cls(
            rows=rows,
            cols=cols,
            labels=gt.labels[rows, cols],
            roles=roles,
            seed=int(data["seed"]),
            fractions=(float(data["fractions"][0]), float(data["fractions"][1])),
            num_classes=gt.num_classes,
            flagged_classes=list(data.get("flagged_classes", [])),
        )


def encode_roles(roles: np.ndarray) -> str:
    """Run-length encode a role sequence, e.g. ``3T1V12X``."""
    if roles.size == 0:
        return ""
    change = np.flatnonzero(np.diff(roles)) + 1
    starts = np.concatenate(([0], change))
    lengths = np.diff(np.concatenate((starts, [roles.size])))
    return "".join(f"{length}{ROLE_CODES[Role(int(roles[start]))]}" for start, length in zip(starts, lengths))


def decode_roles(encoded: str) -> np.ndarray:
    runs = re.findall(r"(\d+)([TVX])", encoded)
    if "".join(f"{n}{c}" for n, c in runs) != encoded:
        raise DataError(f"Malformed run-length role string: {encoded[:40]!r}")
    if not runs:
        return np.zeros(0, dtype=np.int8)
    return np.concatenate([np.full(int(n), CODE_ROLES[c], dtype=np.int8) for n, c in runs])


def apportion(
    totals: np.ndarray, fraction: float, minimums: np.ndarray, capacity: Optional[np.ndarray] = None
) -> np.ndarray:
    """Largest-remainder split of ``floor(sum(totals) * fraction)`` units across classes.

    No class gets more than its ``capacity`` (default: its total). Units a full
    class cannot take move on to the next classes in remainder order.
    """
    capacity = np.asarray(totals if capacity is None else capacity, dtype=np.int64)
    exact = Fraction(fraction).limit_denominator(10**9)
    quotas = [Fraction(int(t)) * exact for t in totals]
    counts = np.array([math.floor(q) for q in quotas], dtype=np.int64)
    remainders = [q - math.floor(q) for q in quotas]

    clamped = counts < minimums
    counts = np.minimum(np.maximum(counts, minimums), capacity)

    target = max(math.floor(Fraction(int(totals.sum())) * exact), int(counts.sum()))
    remaining = target - int(counts.sum())

    # unclamped classes with a fractional remainder first, then any class with room left
    order = sorted(range(len(totals)), key=lambda c: (bool(clamped[c]) or remainders[c] == 0, -remainders[c], c))
    while remaining > 0:
        spare = [c for c in order if counts[c] < capacity[c]]
        if not spare:
            logger.warning("Only %d of %d requested samples fit in the classes", target - remaining, target)
            break
        for c in spare[:remaining]:
            counts[c] += 1
        remaining -= min(remaining, len(spare))

    return counts


def stratified_split(gt: GroundTruthMap, train_frac: float, val_frac: float, seed: int) -> SplitAssignment:
    if train_frac <= 0 or val_frac < 0 or train_frac + val_frac >= 1:
        raise ConfigError(
            f"Split fractions must satisfy train > 0, validation >= 0, train + validation < 1; "
            f"got ({train_frac}, {val_frac})"
        )

    rows, cols = np.nonzero(gt.labels)
    labels = gt.labels[rows, cols]
    totals = gt.class_totals()

    train_min = (totals >= 1).astype(np.int64)
    val_min = ((totals >= MIN_CLASS_SIZE_FOR_VALIDATION) & (val_frac > 0)).astype(np.int64)

    train_counts = apportion(totals, train_frac, train_min)
    val_capacity = np.where(totals >= MIN_CLASS_SIZE_FOR_VALIDATION, totals - train_counts, 0)
    val_counts = apportion(totals, val_frac, val_min, capacity=val_capacity)

    flagged = [int(c) + 1 for c in np.flatnonzero((totals > 0) & (totals < MIN_CLASS_SIZE_FOR_VALIDATION))]
    for class_id in flagged:
        logger.warning("Class %d has only %d labeled pixels, no validation samples", class_id, totals[class_id - 1])

    roles = np.full(labels.size, Role.TEST, dtype=np.int8)
    for class_index in range(gt.num_classes):
        members = np.flatnonzero(labels == class_index + 1)
        if members.size == 0:
            continue
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, class_index])))
        shuffled = members[rng.permutation(members.size)]
        n_train, n_val = train_counts[class_index], val_counts[class_index]
        roles[shuffled[:n_train]] = Role.TRAIN
        roles[shuffled[n_train : n_train + n_val]] = Role.VALIDATION

    split = SplitAssignment(
        rows=rows,
        cols=cols,
        labels=labels,
        roles=roles,
        seed=seed,
        fractions=(train_frac, val_frac),
        num_classes=gt.num_classes,
        flagged_classes=flagged,
    )
    logger.info("Split with seed %d: train %d, validation %d, test %d", seed, *split.totals())
    return split
