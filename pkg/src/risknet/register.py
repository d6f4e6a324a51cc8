"""Risk register ingestion, validation and synthesis.

A register is a table of risks, each carrying a unique id, a title, the
reporting firm, a qualitative independent impact (High/Medium/Low) and a
binary characteristic vector over the register's tag set.

The canonical on-disk format is a UTF-8 CSV with header
``risk_id,title,firm_id,independent_impact,<tag_1>,...,<tag_K>``.
Tag cells must be literal ``0`` or ``1``; blanks are rejected rather than
coerced, since silent zeros would corrupt every downstream similarity.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._seeds import derive_rng

IMPACT_LEVELS = ("High", "Medium", "Low")
IMPACT_RANK = {"Low": 0, "Medium": 1, "High": 2}

FIXED_COLUMNS = ("risk_id", "title", "firm_id", "independent_impact")


class RegisterError(ValueError):
    """Raised when a register file or record violates the schema."""


@dataclass(frozen=True)
class RiskRecord:
    """One risk: identity, attribution and binary characteristics."""

    risk_id: int
    title: str
    firm_id: str
    independent_impact: str
    characteristics: tuple[int, ...]

    def __post_init__(self):
        if self.risk_id <= 0:
            raise RegisterError(f"risk_id must be positive, got {self.risk_id}")
        if self.independent_impact not in IMPACT_LEVELS:
            raise RegisterError(
                f"risk {self.risk_id}: unknown impact label "
                f"{self.independent_impact!r} (expected one of {IMPACT_LEVELS})"
            )
        if any(flag not in (0, 1) for flag in self.characteristics):
            raise RegisterError(f"risk {self.risk_id}: characteristics must be 0/1 flags")


@dataclass(frozen=True)
class RiskRegister:
    """An immutable, validated collection of risks over a shared tag set."""

    tag_names: tuple[str, ...]
    risks: tuple[RiskRecord, ...]

    def __post_init__(self):
        if len(set(self.tag_names)) != len(self.tag_names):
            raise RegisterError("tag names must be distinct")
        seen: set[int] = set()
        for risk in self.risks:
            if risk.risk_id in seen:
                raise RegisterError(f"duplicate risk_id {risk.risk_id}")
            seen.add(risk.risk_id)
            if len(risk.characteristics) != len(self.tag_names):
                raise RegisterError(
                    f"risk {risk.risk_id}: expected {len(self.tag_names)} "
                    f"characteristic flags, got {len(risk.characteristics)}"
                )

    @property
    def n(self) -> int:
        return len(self.risks)

    @property
    def num_tags(self) -> int:
        return len(self.tag_names)

    @property
    def firms(self) -> tuple[str, ...]:
        """Firm ids appearing in the register, sorted."""
        return tuple(sorted({risk.firm_id for risk in self.risks}))

    @property
    def risk_ids(self) -> tuple[int, ...]:
        return tuple(risk.risk_id for risk in self.risks)

    def tag_matrix(self) -> np.ndarray:
        """Characteristics as an (n, K) uint8 matrix in row order."""
        if not self.risks:
            return np.zeros((0, self.num_tags), dtype=np.uint8)
        return np.array([risk.characteristics for risk in self.risks], dtype=np.uint8)

    def firm_indices(self) -> dict[str, list[int]]:
        """Row indices of each firm's risks, keyed by firm id."""
        rows: dict[str, list[int]] = {firm: [] for firm in self.firms}
        for row, risk in enumerate(self.risks):
            rows[risk.firm_id].append(row)
        return rows

    def firm_codes(self) -> np.ndarray:
        """Per-row firm index into the sorted ``firms`` tuple."""
        position = {firm: index for index, firm in enumerate(self.firms)}
        return np.array([position[risk.firm_id] for risk in self.risks], dtype=np.int64)


def load_register(path: str | Path, fmt: str = "csv") -> RiskRegister:
    """Parse and validate a register file (CSV is the canonical format).

    Row order is preserved. Errors name the offending row (1-based,
    excluding the header) and column.
    """
    if fmt != "csv":
        raise ValueError(f"unsupported register format {fmt!r}")
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise RegisterError(f"{path}: empty file, header required") from None
        if tuple(header[: len(FIXED_COLUMNS)]) != FIXED_COLUMNS:
            raise RegisterError(
                f"{path}: header must start with {','.join(FIXED_COLUMNS)}, "
                f"got {','.join(header[:len(FIXED_COLUMNS)])}"
            )
        tag_names = tuple(header[len(FIXED_COLUMNS):])
        risks: list[RiskRecord] = []
        seen_ids: set[int] = set()
        for row_num, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise RegisterError(
                    f"{path}: row {row_num}: expected {len(header)} cells, got {len(row)}"
                )
            try:
                risk_id = int(row[0])
            except ValueError:
                raise RegisterError(
                    f"{path}: row {row_num}, column risk_id: {row[0]!r} is not an integer"
                ) from None
            if risk_id <= 0:
                raise RegisterError(
                    f"{path}: row {row_num}, column risk_id: must be positive, got {risk_id}"
                )
            if risk_id in seen_ids:
                raise RegisterError(f"{path}: row {row_num}: duplicate risk_id {risk_id}")
            seen_ids.add(risk_id)
            impact = row[3]
            if impact not in IMPACT_LEVELS:
                raise RegisterError(
                    f"{path}: row {row_num}, column independent_impact: "
                    f"{impact!r} is not one of High|Medium|Low"
                )
            flags = []
            for tag_idx, cell in enumerate(row[len(FIXED_COLUMNS):]):
                if cell not in ("0", "1"):
                    raise RegisterError(
                        f"{path}: row {row_num}, column {tag_names[tag_idx]}: "
                        f"tag cell must be literal 0 or 1, got {cell!r}"
                    )
                flags.append(int(cell))
            risks.append(
                RiskRecord(
                    risk_id=risk_id,
                    title=row[1],
                    firm_id=row[2],
                    independent_impact=impact,
                    characteristics=tuple(flags),
                )
            )
    return RiskRegister(tag_names=tag_names, risks=tuple(risks))


def save_register(register: RiskRegister, path: str | Path) -> None:
    """Write a register to the canonical CSV layout (round-trip safe)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(FIXED_COLUMNS) + list(register.tag_names))
        for risk in register.risks:
            writer.writerow(
                [risk.risk_id, risk.title, risk.firm_id, risk.independent_impact]
                + list(risk.characteristics)
            )


def impact_counts(register: RiskRegister) -> dict[str, int]:
    """Count High/Medium/Low independent impacts; values sum to n."""
    counts = {level: 0 for level in IMPACT_LEVELS}
    for risk in register.risks:
        counts[risk.independent_impact] += 1
    return counts


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters for a planted-class register.

    Risks are emitted class by class: rows ``[m*risks_per_module,
    (m+1)*risks_per_module)`` belong to planted class ``m``. A class-m
    risk sets the tags of block m to 1 and all others to 0, then every
    bit flips independently with probability ``noise_rate``.
    """

    num_modules: int
    risks_per_module: int
    tags_per_module: int
    noise_rate: float
    firms: int = 5
    seed: int = 0
    total_tags: int | None = field(default=None)

    def __post_init__(self):
        for name in ("num_modules", "risks_per_module", "tags_per_module", "firms"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError(f"noise_rate must be in [0, 1], got {self.noise_rate}")
        if self.num_tags < self.num_modules * self.tags_per_module:
            raise ValueError(
                f"tag blocks need {self.num_modules * self.tags_per_module} tags "
                f"but only {self.num_tags} are available"
            )

    @property
    def num_tags(self) -> int:
        if self.total_tags is not None:
            return self.total_tags
        return self.num_modules * self.tags_per_module

    @property
    def num_risks(self) -> int:
        return self.num_modules * self.risks_per_module

    def planted_labels(self) -> np.ndarray:
        """Planted class index per register row, in row order."""
        return np.repeat(np.arange(self.num_modules), self.risks_per_module)


def _firm_label(index: int) -> str:
    label = ""
    index += 1
    while index > 0:
        index, rem = divmod(index - 1, 26)
        label = chr(ord("A") + rem) + label
    return label


def synthesize_register(spec: SyntheticSpec) -> RiskRegister:
    """Generate a planted-class register, deterministic under spec.seed.

    Firms and independent impacts are assigned uniformly at random from
    the same seeded stream so downstream firm-level reports have content.
    """
    rng = derive_rng(spec.seed)
    k = spec.num_tags
    labels = spec.planted_labels()
    base = np.zeros((spec.num_risks, k), dtype=np.uint8)
    for row, cls in enumerate(labels):
        start = cls * spec.tags_per_module
        base[row, start : start + spec.tags_per_module] = 1
    flips = rng.random((spec.num_risks, k)) < spec.noise_rate
    bits = np.where(flips, 1 - base, base)

    firm_pool = [_firm_label(i) for i in range(spec.firms)]
    firm_choice = rng.integers(0, spec.firms, size=spec.num_risks)
    impact_choice = rng.integers(0, len(IMPACT_LEVELS), size=spec.num_risks)

    tag_names = tuple(f"tag_{i + 1:02d}" for i in range(k))
    risks = tuple(
        RiskRecord(
            risk_id=row + 1,
            title=f"Synthetic risk {row + 1}",
            firm_id=firm_pool[firm_choice[row]],
            independent_impact=IMPACT_LEVELS[impact_choice[row]],
            characteristics=tuple(int(v) for v in bits[row]),
        )
        for row in range(spec.num_risks)
    )
    return RiskRegister(tag_names=tag_names, risks=risks)
