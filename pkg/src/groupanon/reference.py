"""Bundled worked example: reference vectors and synthetic microfiles.

The package ships one fully worked anonymization case built around a
military-personnel group distributed over 16 coastal statistical areas.
This module holds every checkpoint of that case (signals, wavelet
coefficients, constraint systems, solutions, repaired outputs) as frozen
constants, plus deterministic builders for two synthetic microfiles whose
group counts reproduce the reference signals exactly.  ``verify`` and the
test suite treat these values as ground truth.

Two internal inconsistencies of the reference material are retained
deliberately and documented where they surface:

* ``QUANTITY_SOLUTION_RAW`` carries a corrupted third coefficient; the
  value actually consistent with every downstream checkpoint is 1000.0
  (recoverable from QUANTITY_REASSEMBLED by least squares to three decimal
  places), and ``QUANTITY_SOLUTION`` stores the consistent vector.
* ``CONCENTRATION_SOLUTION`` violates the position-5 row of
  ``CONCENTRATION_SYSTEM`` by about 3.7e-3; the verifier reports this as a
  known discrepancy rather than hiding or "fixing" it.
"""

from __future__ import annotations

import numpy as np

from .microfile import Attribute, GroupSpec, Microfile

__all__ = [
    "AREA_CODES",
    "QUANTITY",
    "CONCENTRATION",
    "FIXTURE_SCHEMA",
    "fixture_group",
    "build_quantity_microfile",
    "build_concentration_microfile",
]

#: Ordered parameter values: the 16 statistical-area codes.
AREA_CODES = (
    "06010", "06020", "06030", "06040", "06060", "06070", "06080", "06090",
    "06130", "06170", "06200", "06220", "06230", "06409", "06600", "06700",
)

# ---------------------------------------------------------------------------
# Quantity case: counts of group members per area.
# ---------------------------------------------------------------------------

QUANTITY = np.array(
    [19, 12, 153, 71, 13, 79, 7, 33, 16, 270, 812, 135, 241, 14, 60, 4337], float
)

QUANTITY_APPROX_2 = np.array([2272.128, 136.352, 158.422, 569.098])
QUANTITY_DETAIL_2 = np.array([-508.185, 15.587, 546.921, -315.680])

QUANTITY_APPROX_COMPONENT = np.array(
    [1369.821, 687.286, 244.677, 41.992, -224.980, 11.373, 112.860, 79.481,
     82.240, 175.643, 244.757, 289.584, 340.918, 693.698, 965.706, 1156.942]
)
QUANTITY_DETAIL_COMPONENT = np.array(
    [-1350.821, -675.286, -91.677, 29.008, 237.980, 67.627, -105.860, -46.481,
     -66.240, 94.357, 567.243, -154.584, -99.918, -679.698, -905.706, 3180.058]
)

#: Constraint system of the quantity case: (position, relation, bound) plus
#: the three-decimal coefficients its rows print for the matrix check.
QUANTITY_SYSTEM = (
    (1, "<=", 1369.821, (0.637, 0.0, 0.0, -0.137)),
    (2, "<=", 687.286, (0.296, 0.233, 0.0, -0.029)),
    (3, "<=", 244.677, (0.079, 0.404, 0.0, 0.017)),
    (5, ">=", -224.980, (-0.137, 0.637, 0.0, 0.0)),
    (6, ">=", 11.373, (-0.029, 0.296, 0.233, 0.0)),
    (7, ">=", 112.860, (0.017, 0.079, 0.404, 0.0)),
    (8, ">=", 79.481, (0.0, -0.012, 0.512, 0.0)),
    (9, ">=", 82.240, (0.0, -0.137, 0.637, 0.0)),
    (10, ">=", 175.643, (0.0, -0.029, 0.296, 0.233)),
    (14, ">=", 693.698, (0.233, 0.0, -0.029, 0.296)),
    (15, "<=", 965.706, (0.404, 0.0, 0.017, 0.079)),
    (16, "<=", 1156.942, (0.512, 0.0, 0.0, -0.012)),
)

#: Replacement approximation coefficients consistent with every downstream
#: reference vector (see module docstring).
QUANTITY_SOLUTION = np.array([0.0, 379.097, 1000.0, 5464.854])

#: The same solution as originally recorded, third coefficient corrupted.
QUANTITY_SOLUTION_RAW = np.array([0.0, 379.097, 31805.084, 5464.854])

QUANTITY_NEW_APPROX_COMPONENT = np.array(
    [-750.103, -70.090, 244.677, 194.196, 241.583, 345.372, 434.049, 507.612,
     585.225, 1559.452, 2293.431, 2787.164, 3345.271, 1587.242, 449.819, -66.997]
)
QUANTITY_REASSEMBLED = np.array(
    [-2100.924, -745.376, 153.000, 223.204, 479.563, 413.000, 328.189, 461.131,
     518.985, 1653.809, 2860.674, 2632.580, 3245.352, 907.543, -455.887, 3113.061]
)

QUANTITY_SHIFT = 2150.0

QUANTITY_FINAL = np.array(
    [6, 183, 300, 310, 343, 334, 323, 341, 348, 496, 654, 624, 704, 399, 221, 686],
    dtype=np.int64,
)

#: Sample mean and standard deviation (ddof=1) of QUANTITY, frozen from a
#: direct-summation computation.
QUANTITY_MEAN = 392.0
QUANTITY_STD = 1070.8267833781522

# ---------------------------------------------------------------------------
# Concentration case: the same group against the male superset population.
# ---------------------------------------------------------------------------

CONCENTRATION = np.array(
    [0.004, 0.002, 0.033, 0.009, 0.002, 0.012, 0.002, 0.007, 0.001, 0.035,
     0.058, 0.017, 0.030, 0.003, 0.004, 0.128]
)

#: Superset population counts per area; chosen so QUANTITY / denominators
#: rounds to CONCENTRATION at three decimals.
CONCENTRATION_DENOMINATORS = np.array(
    [4750, 6000, 4636, 7889, 6500, 6583, 3500, 4714, 16000, 7714,
     14000, 7941, 8033, 4667, 15000, 33883], float
)

CONCENTRATION_APPROX_2 = np.array([0.073, 0.023, 0.018, 0.059])
CONCENTRATION_DETAIL_2 = np.array([0.003, -0.001, 0.036, -0.018])

CONCENTRATION_APPROX_COMPONENT = np.array(
    [0.038, 0.025, 0.016, 0.011, 0.004, 0.009, 0.010, 0.009, 0.008, 0.019,
     0.026, 0.030, 0.035, 0.034, 0.034, 0.037]
)
CONCENTRATION_DETAIL_COMPONENT = np.array(
    [-0.034, -0.023, 0.017, -0.002, -0.002, 0.003, -0.009, -0.002, -0.007,
     0.016, 0.032, -0.013, -0.005, -0.031, -0.030, 0.091]
)

CONCENTRATION_SYSTEM = (
    (1, "<=", 0.038, (0.637, 0.0, 0.0, -0.137)),
    (2, "<=", 0.025, (0.296, 0.233, 0.0, -0.029)),
    (3, "<=", 0.016, (0.079, 0.404, 0.0, 0.017)),
    (4, "<=", 0.011, (-0.012, 0.512, 0.0, 0.0)),
    (5, ">=", 0.005, (-0.137, 0.637, 0.0, 0.0)),
    (6, ">=", 0.009, (-0.029, 0.296, 0.233, 0.0)),
    (7, ">=", 0.010, (0.017, 0.079, 0.404, 0.0)),
    (8, ">=", 0.009, (0.0, -0.012, 0.512, 0.0)),
    (9, ">=", 0.009, (0.0, -0.137, 0.637, 0.0)),
    (10, ">=", 0.019, (0.0, -0.029, 0.296, 0.233)),
    (14, "<=", 0.034, (0.233, 0.0, -0.029, 0.296)),
    (15, "<=", 0.034, (0.404, 0.0, 0.017, 0.079)),
    (16, "<=", 0.037, (0.512, 0.0, 0.0, -0.012)),
)

CONCENTRATION_SOLUTION = np.array([0.0, 0.002, 0.147, 0.025])

#: The position-5 row of CONCENTRATION_SYSTEM is violated by
#: CONCENTRATION_SOLUTION by this margin; see module docstring.
CONCENTRATION_KNOWN_VIOLATION = {"position": 5, "violation": 3.726e-3}

CONCENTRATION_NEW_APPROX_COMPONENT = np.array(
    [-0.003, -0.000, 0.001, 0.001, 0.001, 0.035, 0.059, 0.075, 0.093, 0.049,
     0.022, 0.011, -0.004, 0.003, 0.005, 0.000]
)
CONCENTRATION_REASSEMBLED = np.array(
    [-0.037, -0.023, 0.018, -0.001, -0.002, 0.038, 0.051, 0.073, 0.086, 0.066,
     0.054, -0.002, -0.009, -0.028, -0.026, 0.092]
)

CONCENTRATION_SHIFT = 0.5

CONCENTRATION_SHIFTED = np.array(
    [0.463, 0.477, 0.518, 0.499, 0.498, 0.538, 0.551, 0.573, 0.586, 0.566,
     0.554, 0.498, 0.491, 0.472, 0.474, 0.592]
)

#: CONCENTRATION_SHIFTED converted back to integer quantities against
#: CONCENTRATION_DENOMINATORS with the member total preserved (frozen from
#: the brute-force largest-remainder oracle in the test suite).
CONCENTRATION_CONVERTED = np.array(
    [169, 220, 185, 303, 249, 272, 148, 208, 721, 336, 596, 304, 303, 169, 547, 1542],
    dtype=np.int64,
)

# ---------------------------------------------------------------------------
# Synthetic microfiles realizing the reference signals.
# ---------------------------------------------------------------------------

FIXTURE_SCHEMA = (
    Attribute("area", "nominal", "parameter"),
    Attribute("military_service", "nominal", "vital", weight=1.0),
    Attribute("sex", "nominal", "plain"),
    Attribute("age", "ordinal", "influential", weight=1.0),
    Attribute("income", "ordinal", "influential", weight=1.0),
)


def fixture_group(with_superset: bool = True) -> GroupSpec:
    """Group spec for the bundled fixtures: active military across the areas.

    The superset population is the male respondents, which keeps
    concentration denominators invariant under swap plans.
    """
    return GroupSpec.create(
        vital={"military_service": {"1"}},
        parameter="area",
        parameter_order=AREA_CODES,
        superset_vital={"sex": {"1"}} if with_superset else None,
    )


_NON_MEMBER_SERVICE = ("0", "2", "3", "4")


def _assemble(columns: dict[str, np.ndarray]) -> Microfile:
    return Microfile(attributes=FIXTURE_SCHEMA, columns=columns)


def build_quantity_microfile() -> Microfile:
    """Deterministic ~13k-record microfile whose group counts equal QUANTITY.

    Every area also holds enough male non-members to absorb the gains that
    QUANTITY_FINAL demands, plus a margin, plus some female records outside
    the superset.  Record order is a fixed shuffle so area blocks are not
    contiguous.
    """
    rng = np.random.default_rng(186_000)
    deficits = np.maximum(QUANTITY_FINAL - QUANTITY.astype(np.int64), 0)

    area_parts, service_parts, sex_parts = [], [], []
    age_parts, income_parts = [], []
    for pos, code in enumerate(AREA_CODES):
        n_members = int(QUANTITY[pos])
        n_partners = int(deficits[pos]) + 150
        area_parts.append(np.full(n_members + n_partners, code))
        service_parts.append(np.full(n_members, "1"))
        service_parts.append(rng.choice(_NON_MEMBER_SERVICE, n_partners))
        sex_parts.append(np.full(n_members + n_partners, "1"))
        age_parts.append(rng.integers(18, 60, n_members).astype(float))
        age_parts.append(rng.integers(18, 71, n_partners).astype(float))
        income_parts.append(rng.integers(18_000, 95_000, n_members + n_partners).astype(float))

    n_extra = 400
    area_parts.append(rng.choice(AREA_CODES, n_extra))
    service_parts.append(rng.choice(("0", "2"), n_extra))
    sex_parts.append(np.full(n_extra, "2"))
    age_parts.append(rng.integers(16, 85, n_extra).astype(float))
    income_parts.append(rng.integers(12_000, 95_000, n_extra).astype(float))

    area = np.concatenate(area_parts)
    service = np.concatenate(service_parts)
    sex = np.concatenate(sex_parts)
    age = np.concatenate(age_parts)
    income = np.concatenate(income_parts)

    perm = rng.permutation(area.size)
    return _assemble(
        {
            "area": area[perm],
            "military_service": service[perm],
            "sex": sex[perm],
            "age": age[perm],
            "income": income[perm],
        }
    )


def build_concentration_microfile() -> Microfile:
    """~152k-record microfile whose concentrations round to CONCENTRATION.

    All records are male (the superset), so per-area denominators equal the
    per-area record counts, which are CONCENTRATION_DENOMINATORS by
    construction.  Built in memory; too large to ship as CSV.
    """
    rng = np.random.default_rng(151_810)
    area_parts, service_parts = [], []
    for pos, code in enumerate(AREA_CODES):
        n_members = int(QUANTITY[pos])
        n_others = int(CONCENTRATION_DENOMINATORS[pos]) - n_members
        area_parts.append(np.full(n_members + n_others, code))
        service_parts.append(np.full(n_members, "1"))
        service_parts.append(rng.choice(_NON_MEMBER_SERVICE, n_others))
    area = np.concatenate(area_parts)
    service = np.concatenate(service_parts)
    n = area.size
    return _assemble(
        {
            "area": area,
            "military_service": service,
            "sex": np.full(n, "1"),
            "age": np.full(n, 40.0),
            "income": np.full(n, 50_000.0),
        }
    )


def fixture_path():
    """Path of the packaged quantity-case CSV."""
    from importlib.resources import files

    return files("groupanon").joinpath("data/military.csv")


def load_quantity_microfile(path=None) -> Microfile:
    """Load the shipped quantity-case CSV (or a copy of it at ``path``)."""
    from .microfile import load_microfile

    return load_microfile(path if path is not None else fixture_path(), FIXTURE_SCHEMA)
