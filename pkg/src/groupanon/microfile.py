"""Tabular respondent data with attribute-role metadata.

A microfile is a rectangular table of records over named attributes.  Each
attribute is either ordinal (stored as float64) or nominal (stored as
strings) and carries a role:

* ``vital``       - defines protected respondent groups; always carries an
                    influential-metric weight,
* ``parameter``   - the attribute whose ordered values index goal signals
                    and the only one record swaps may touch,
* ``influential`` - weighted in the record-closeness metric,
* ``plain``       - everything else.

Identifier columns never make it into a microfile: ingestion drops any
column declared as an identifier and logs a warning.  Instances are
immutable; modification happens by constructing a new table.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParseError, SchemaError

__all__ = [
    "Attribute",
    "Microfile",
    "GroupSpec",
    "load_microfile",
    "write_microfile",
    "members",
    "record_view",
]

logger = logging.getLogger(__name__)

KINDS = ("ordinal", "nominal")
ROLES = ("vital", "parameter", "influential", "plain")
_WEIGHTED_ROLES = ("vital", "influential")


@dataclass(frozen=True)
class Attribute:
    """Column description: name, value kind, role, optional metric weight."""

    name: str
    kind: str
    role: str
    weight: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"attribute {self.name!r}: unknown kind {self.kind!r}")
        if self.role not in ROLES:
            raise SchemaError(f"attribute {self.name!r}: unknown role {self.role!r}")
        if self.role in _WEIGHTED_ROLES:
            if self.weight is None or self.weight < 0:
                raise SchemaError(
                    f"attribute {self.name!r}: role {self.role!r} requires a "
                    "non-negative weight"
                )
        elif self.weight is not None:
            raise SchemaError(
                f"attribute {self.name!r}: weight is only meaningful for roles "
                f"{_WEIGHTED_ROLES}"
            )


@dataclass(frozen=True)
class Microfile:
    """Immutable table: attribute metadata plus one column array per attribute."""

    attributes: tuple[Attribute, ...]
    columns: dict[str, np.ndarray]

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError("attribute names must be unique")
        if set(names) != set(self.columns):
            raise SchemaError("columns must match declared attributes exactly")
        lengths = {col.shape[0] for col in self.columns.values()}
        if len(lengths) > 1:
            raise SchemaError(f"ragged columns: lengths {sorted(lengths)}")
        for col in self.columns.values():
            col.setflags(write=False)

    @property
    def n_records(self) -> int:
        if not self.columns:
            return 0
        return next(iter(self.columns.values())).shape[0]

    def attribute(self, name: str) -> Attribute:
        for a in self.attributes:
            if a.name == name:
                return a
        raise SchemaError(f"no attribute named {name!r}")

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise SchemaError(f"no attribute named {name!r}") from None

    def with_column(self, name: str, values: np.ndarray) -> "Microfile":
        """New microfile with one column replaced."""
        self.attribute(name)
        if values.shape[0] != self.n_records:
            raise SchemaError("replacement column has wrong length")
        cols = dict(self.columns)
        cols[name] = values
        return replace(self, columns=cols)


def record_view(m: Microfile, index: int) -> dict[str, object]:
    """One record as an attribute-name to value mapping."""
    return {name: col[index] for name, col in m.columns.items()}


@dataclass(frozen=True)
class GroupSpec:
    """A respondent group: vital value combination plus a parameter axis.

    ``vital`` maps attribute names to accepted value sets; a record belongs
    to the group when it matches every pair.  ``parameter_order`` fixes the
    goal-signal axis.  ``superset_vital``, when given, defines the wider
    population used for concentration denominators and swap partners; the
    group must be contained in it.
    """

    vital: tuple[tuple[str, frozenset], ...]
    parameter: str
    parameter_order: tuple[str, ...]
    superset_vital: tuple[tuple[str, frozenset], ...] | None = None

    def __post_init__(self):
        vital_names = [name for name, _ in self.vital]
        if len(set(vital_names)) != len(vital_names):
            raise SchemaError("duplicate attribute in vital combination")
        if self.parameter in vital_names:
            raise SchemaError(
                f"parameter attribute {self.parameter!r} cannot also be vital"
            )
        if len(self.parameter_order) < 4:
            raise SchemaError("parameter order must list at least 4 values")
        if len(set(self.parameter_order)) != len(self.parameter_order):
            raise SchemaError("parameter order contains duplicate values")

    @classmethod
    def create(
        cls,
        vital: Mapping[str, Iterable],
        parameter: str,
        parameter_order: Sequence[str],
        superset_vital: Mapping[str, Iterable] | None = None,
    ) -> "GroupSpec":
        def freeze(mapping):
            return tuple((name, frozenset(vals)) for name, vals in mapping.items())

        return cls(
            vital=freeze(vital),
            parameter=parameter,
            parameter_order=tuple(parameter_order),
            superset_vital=None if superset_vital is None else freeze(superset_vital),
        )


def _match_mask(m: Microfile, pairs: tuple[tuple[str, frozenset], ...]) -> np.ndarray:
    mask = np.ones(m.n_records, dtype=bool)
    for name, values in pairs:
        attr = m.attribute(name)
        col = m.column(name)
        wanted = [float(v) for v in values] if attr.kind == "ordinal" else [str(v) for v in values]
        mask &= np.isin(col, wanted)
    return mask


def members(m: Microfile, g: GroupSpec) -> np.ndarray:
    """Indices of records matching every vital (attribute, value-set) pair.

    An empty vital combination matches every record.
    """
    for name, _ in g.vital:
        m.attribute(name)
    m.attribute(g.parameter)
    return np.flatnonzero(_match_mask(m, g.vital))


def superset_members(m: Microfile, g: GroupSpec) -> np.ndarray:
    """Indices of records in the superset population (requires superset_vital)."""
    if g.superset_vital is None:
        raise SchemaError("group spec declares no superset population")
    return np.flatnonzero(_match_mask(m, g.superset_vital))


def check_group_in_superset(m: Microfile, g: GroupSpec) -> None:
    """Raise unless every group member also matches the superset combination."""
    if g.superset_vital is None:
        return
    inside = _match_mask(m, g.superset_vital)
    outside = np.flatnonzero(_match_mask(m, g.vital) & ~inside)
    if outside.size:
        raise SchemaError(
            f"{outside.size} group member(s) fall outside the declared superset "
            f"(first record index {int(outside[0])})"
        )


def load_microfile(
    path: str | Path,
    schema: Sequence[Attribute],
    identifiers: Sequence[str] = (),
) -> Microfile:
    """Read a header-bearing CSV file against a declared schema.

    ``schema`` must name a subset of the header columns; columns listed in
    ``identifiers`` are dropped with a warning, undeclared columns are
    ignored.  Ordinal cells parse as float64; empty cells are allowed (as
    missing values) only in plain columns.
    """
    path = Path(path)
    if not schema:
        raise SchemaError("schema must declare at least one attribute")
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError(f"{path}: file is empty") from None
            rows = list(reader)
    except OSError as exc:
        raise ParseError(f"{path}: cannot read: {exc}") from exc

    positions = {name: i for i, name in enumerate(header)}
    for ident in identifiers:
        if ident in positions:
            logger.warning("%s: dropping identifier column %r", path, ident)
    schema_names = {a.name for a in schema}
    if overlap := schema_names & set(identifiers):
        raise SchemaError(f"attributes {sorted(overlap)} declared both in schema and as identifiers")
    missing = [a.name for a in schema if a.name not in positions]
    if missing:
        raise SchemaError(f"{path}: declared columns missing from header: {missing}")

    width = len(header)
    for rownum, row in enumerate(rows, start=2):
        if len(row) != width:
            raise ParseError(
                f"{path}: row {rownum} has {len(row)} fields, expected {width}"
            )

    columns: dict[str, np.ndarray] = {}
    for attr in schema:
        pos = positions[attr.name]
        raw = [row[pos] for row in rows]
        if attr.kind == "nominal":
            empty_ok = attr.role == "plain"
            for rownum, value in enumerate(raw, start=2):
                if value == "" and not empty_ok:
                    raise ParseError(
                        f"{path}: row {rownum}: empty value in "
                        f"{attr.role} column {attr.name!r}"
                    )
            columns[attr.name] = np.array(raw, dtype=str) if raw else np.empty(0, dtype="<U1")
        else:
            values = np.empty(len(raw))
            for i, value in enumerate(raw):
                if value == "":
                    if attr.role != "plain":
                        raise ParseError(
                            f"{path}: row {i + 2}: empty value in "
                            f"{attr.role} column {attr.name!r}"
                        )
                    values[i] = np.nan
                    continue
                try:
                    values[i] = float(value)
                except ValueError:
                    raise ParseError(
                        f"{path}: row {i + 2}: non-numeric value {value!r} in "
                        f"ordinal column {attr.name!r}"
                    ) from None
            columns[attr.name] = values

    return Microfile(attributes=tuple(schema), columns=columns)


def _format_cell(attr: Attribute, value) -> str:
    if attr.kind == "nominal":
        return str(value)
    v = float(value)
    if np.isnan(v):
        return ""
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def write_microfile(m: Microfile, path: str | Path) -> None:
    """Emit CSV with the header first; order of records and columns preserved.

    Integer-valued ordinals are written without a decimal point, so a file
    of integer codes round-trips textually.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([a.name for a in m.attributes])
        cols = [m.columns[a.name] for a in m.attributes]
        for i in range(m.n_records):
            writer.writerow(
                [_format_cell(a, col[i]) for a, col in zip(m.attributes, cols)]
            )
