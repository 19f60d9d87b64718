"""Job files: TOML descriptions of a ring, optional ideal, family and command.

Schema (all keys at top level unless noted)::

    command = "k1"            # verify-identities | k1 | relative-k1 | exactness
                              # | perfectness | gamma-action | stabilization
    family = [0, 1]           # grade elements: int (rank-1 groups) or int arrays
    level = 1
    levels = [1, 2, 3]        # stabilization only
    lambda = 1                # gamma-action only
    cap = 1000000
    format = "text"           # text | structured
    seed = 0
    workers = 1
    samples = 10              # verify-identities only
    identities = ["hyperbolic", ...]

    [ring]                    # kind-specific keys, see RING_KINDS
    kind = "trivial"
    modulus = 4

    [ideal]
    generators = [2]          # literals, or {degree = [...], value = literal}

    [[matrices]]              # optional explicit matrices
    entries = [[1, [1, -1]], [[1, 1], 1]]
    family = [0, 1]           # defaults to the job family
    degree = 0

    [[elementary]]            # optional explicit generators, 1-based
    i = 1
    j = 2
    r = [1, -1]
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from .errors import DegreeError, JobError, JobSyntaxError
from .grading import GradeElement, GradeGroup, TRIVIAL
from .groups import DEFAULT_CAP
from .matrices import ElementaryGenerator, GradedMatrix, ShiftFamily
from .rings import (
    DoubleRing,
    GradedIdeal,
    GradedRing,
    GroupRing,
    LaurentRing,
    PairRing,
    QuotientRing,
    TrivialRing,
)

COMMANDS = (
    "verify-identities",
    "k1",
    "relative-k1",
    "exactness",
    "perfectness",
    "gamma-action",
    "stabilization",
)
NEEDS_IDEAL = ("relative-k1", "exactness")
IDENTITIES = (
    "hyperbolic",
    "commutator",
    "stable-perfectness",
    "strong-perfectness",
    "rotation",
    "conjugate-block",
)
FORMATS = ("text", "structured")
RING_KINDS = ("trivial", "laurent", "group-ring", "pair", "quotient", "double")

_TOP_KEYS = {
    "command", "family", "level", "levels", "lambda", "cap", "format", "seed",
    "workers", "samples", "identities", "ring", "ideal", "matrices", "elementary",
}


@dataclass
class JobSpec:
    command: str
    ring: GradedRing
    family: ShiftFamily
    ideal: Optional[GradedIdeal] = None
    level: int = 1
    levels: Optional[list[int]] = None
    lam: Optional[GradeElement] = None
    cap: int = DEFAULT_CAP
    format: str = "text"
    seed: int = 0
    workers: int = 1
    samples: int = 10
    identities: list[str] = field(default_factory=lambda: list(IDENTITIES))
    matrices: list[GradedMatrix] = field(default_factory=list)
    elementary: list[ElementaryGenerator] = field(default_factory=list)

    def to_dict(self) -> dict:
        return job_to_dict(self)


# ---------------------------------------------------------------------------
# parsing helpers


def _int(value, what: str, minimum: Optional[int] = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise JobError(f"{what} must be an integer, got {value!r}", field=what)
    if minimum is not None and value < minimum:
        raise JobError(f"{what} must be >= {minimum}, got {value}", field=what)
    return value


def parse_grading(raw) -> GradeGroup:
    if not isinstance(raw, dict):
        raise JobError(f"grading must be a table, got {raw!r}", field="grading")
    unknown = set(raw) - {"free_rank", "torsion"}
    if unknown:
        raise JobError(f"unknown grading keys {sorted(unknown)}", field="grading")
    rank = _int(raw.get("free_rank", 0), "grading.free_rank", 0)
    torsion = raw.get("torsion", [])
    if not isinstance(torsion, list):
        raise JobError("grading.torsion must be a list", field="grading.torsion")
    orders = tuple(_int(t, "grading.torsion", 2) for t in torsion)
    return GradeGroup(rank, orders)


def parse_grade(group: GradeGroup, raw, what: str = "grade element") -> GradeElement:
    if isinstance(raw, int) and not isinstance(raw, bool):
        if group.rank != 1:
            raise JobError(f"{what}: integer shorthand needs a rank-1 grading", field=what)
        raw = [raw]
    if not isinstance(raw, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in raw):
        raise JobError(f"{what} must be an integer array, got {raw!r}", field=what)
    if len(raw) != group.rank:
        raise JobError(f"{what} needs {group.rank} components, got {len(raw)}", field=what)
    return group.element(*raw)


def _grade_literal(x: GradeElement) -> list[int]:
    return list(x.components)


def parse_ring(raw) -> GradedRing:
    if not isinstance(raw, dict):
        raise JobError("[ring] must be a table", field="ring")
    kind = raw.get("kind")
    if kind not in RING_KINDS:
        raise JobError(f"ring.kind must be one of {list(RING_KINDS)}, got {kind!r}", field="ring.kind")
    allowed = {
        "trivial": {"modulus", "coefficient_group", "grading"},
        "laurent": {"field"},
        "group-ring": {"modulus", "grading"},
        "pair": {"modulus", "ideal"},
        "quotient": {"base", "ideal"},
        "double": {"base", "ideal"},
    }[kind]
    unknown = set(raw) - allowed - {"kind"}
    if unknown:
        raise JobError(f"unknown keys for {kind} ring: {sorted(unknown)}", field="ring")
    try:
        if kind == "trivial":
            group = tuple(_int(n, "ring.coefficient_group", 2) for n in raw.get("coefficient_group", []))
            grading = parse_grading(raw["grading"]) if "grading" in raw else TRIVIAL
            return TrivialRing(_int(raw.get("modulus"), "ring.modulus", 2), group, grading)
        if kind == "laurent":
            return LaurentRing(_int(raw.get("field"), "ring.field", 2))
        if kind == "group-ring":
            grading = parse_grading(raw.get("grading", {"torsion": [2]}))
            if not grading.is_finite:
                raise JobError("group-ring gradings must be finite; use kind = \"laurent\" for Z", field="ring.grading")
            return GroupRing(_int(raw.get("modulus"), "ring.modulus", 2), grading)
        if kind == "pair":
            return PairRing(_int(raw.get("modulus"), "ring.modulus", 2), _int(raw.get("ideal"), "ring.ideal", 0))
        base = parse_ring(raw.get("base"))
        ideal = parse_ideal(base, raw.get("ideal"))
        return QuotientRing(base, ideal) if kind == "quotient" else DoubleRing(base, ideal)
    except ValueError as exc:
        raise JobError(f"invalid {kind} ring: {exc}", field="ring") from exc


def parse_element(ring: GradedRing, raw, degree: Optional[GradeElement] = None, what: str = "element"):
    try:
        return ring.parse(raw, degree)
    except DegreeError as exc:
        raise DegreeError(f"{what}: {exc}", **exc.details) from exc
    except (TypeError, ValueError, KeyError) as exc:
        raise JobError(f"{what}: cannot parse literal {raw!r} ({exc})", field=what) from exc


def parse_ideal(ring: GradedRing, raw) -> GradedIdeal:
    if not isinstance(raw, dict) or not isinstance(raw.get("generators"), list):
        raise JobError("ideal must be a table with a 'generators' list", field="ideal")
    gens = []
    for k, g in enumerate(raw["generators"]):
        what = f"ideal.generators[{k}]"
        if isinstance(g, dict) and "value" in g:
            deg = parse_grade(ring.grading, g.get("degree", [0] * ring.grading.rank), what + ".degree")
            gens.append(parse_element(ring, g["value"], deg, what))
        else:
            gens.append(parse_element(ring, g, None, what))
    return GradedIdeal(ring, tuple(gens))


def parse_family(group: GradeGroup, raw, what: str = "family") -> ShiftFamily:
    if not isinstance(raw, list):
        raise JobError(f"{what} must be a list of grade elements", field=what)
    if not raw:
        raise JobError(f"{what} is empty; a family needs at least one shift", field=what)
    return ShiftFamily(group, tuple(parse_grade(group, x, f"{what}[{k}]") for k, x in enumerate(raw)))


def parse_matrix(ring: GradedRing, raw, default_family: ShiftFamily, what: str) -> GradedMatrix:
    if not isinstance(raw, dict) or "entries" not in raw:
        raise JobError(f"{what} needs an 'entries' array", field=what)
    fam = parse_family(ring.grading, raw["family"], what + ".family") if "family" in raw else default_family
    delta = parse_grade(ring.grading, raw["degree"], what + ".degree") if "degree" in raw else ring.grading.zero()
    rows = raw["entries"]
    n = len(fam)
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise JobError(f"{what}: entries must be a {n}x{n} array", field=what)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            expected = delta + fam[i] - fam[j]
            row.append(parse_element(ring, rows[i][j], expected, f"{what} entry ({i + 1},{j + 1})"))
        out.append(row)
    return GradedMatrix(ring, fam, delta, out)


def parse_elementary(ring: GradedRing, raw, family: ShiftFamily, what: str) -> ElementaryGenerator:
    if not isinstance(raw, dict) or not {"i", "j", "r"} <= set(raw):
        raise JobError(f"{what} needs keys i, j, r", field=what)
    n = len(family)
    i = _int(raw["i"], what + ".i", 1)
    j = _int(raw["j"], what + ".j", 1)
    if i > n or j > n or i == j:
        raise JobError(f"{what}: need distinct indices in 1..{n}, got ({i},{j})", field=what)
    expected = family.entry_degree(i - 1, j - 1)
    r = parse_element(ring, raw["r"], expected, f"{what} e_{{{i},{j}}}")
    return ElementaryGenerator(family, i - 1, j - 1, r)


# ---------------------------------------------------------------------------


def parse_job(text: str, command: Optional[str] = None) -> JobSpec:
    """Parse and validate a job file; literals are degree-checked here."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        col = getattr(exc, "colno", None)
        raise JobSyntaxError(str(exc), line=line, column=col) from exc
    return job_from_dict(raw, command)


def job_from_dict(raw: dict, command: Optional[str] = None) -> JobSpec:
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise JobError(f"unknown job keys {sorted(unknown)}", field="job")
    file_cmd = raw.get("command")
    if command and file_cmd and command != file_cmd:
        raise JobError(f"job file is for {file_cmd!r}, not {command!r}", field="command")
    cmd = command or file_cmd
    if cmd not in COMMANDS:
        raise JobError(f"command must be one of {list(COMMANDS)}, got {cmd!r}", field="command")
    if "ring" not in raw:
        raise JobError("job needs a [ring] table", field="ring")
    ring = parse_ring(raw["ring"])
    if "family" not in raw:
        raise JobError("job needs a family", field="family")
    family = parse_family(ring.grading, raw["family"])
    spec = JobSpec(cmd, ring, family)
    if "ideal" in raw:
        spec.ideal = parse_ideal(ring, raw["ideal"])
    elif cmd in NEEDS_IDEAL:
        raise JobError(f"{cmd} needs an [ideal] table", field="ideal")
    spec.level = _int(raw.get("level", 1), "level", 1)
    if "levels" in raw:
        if not isinstance(raw["levels"], list) or not raw["levels"]:
            raise JobError("levels must be a nonempty list", field="levels")
        spec.levels = [_int(v, "levels", 1) for v in raw["levels"]]
    if "lambda" in raw:
        spec.lam = parse_grade(ring.grading, raw["lambda"], "lambda")
    elif cmd == "gamma-action":
        raise JobError("gamma-action needs lambda", field="lambda")
    spec.cap = _int(raw.get("cap", DEFAULT_CAP), "cap", 1)
    spec.format = raw.get("format", "text")
    if spec.format not in FORMATS:
        raise JobError(f"format must be one of {list(FORMATS)}", field="format")
    spec.seed = _int(raw.get("seed", 0), "seed")
    spec.workers = _int(raw.get("workers", 1), "workers", 1)
    spec.samples = _int(raw.get("samples", 10), "samples", 0)
    if "identities" in raw:
        ids = raw["identities"]
        if not isinstance(ids, list) or any(x not in IDENTITIES for x in ids):
            raise JobError(f"identities must be drawn from {list(IDENTITIES)}", field="identities")
        spec.identities = list(ids)
    spec.matrices = [
        parse_matrix(ring, m, family, f"matrices[{k}]") for k, m in enumerate(raw.get("matrices", []))
    ]
    spec.elementary = [
        parse_elementary(ring, e, family, f"elementary[{k}]") for k, e in enumerate(raw.get("elementary", []))
    ]
    return spec


# ---------------------------------------------------------------------------
# emitting


def ring_to_dict(ring: GradedRing) -> dict:
    if isinstance(ring, (QuotientRing, DoubleRing)):
        return {"kind": ring.kind, "base": ring_to_dict(ring.base), "ideal": ideal_to_dict(ring.ideal)}
    return ring.describe()


def ideal_to_dict(ideal: GradedIdeal) -> dict:
    return {
        "generators": [
            {"degree": _grade_literal(g.degree), "value": g.literal()} for g in ideal.generators
        ]
    }


def job_to_dict(spec: JobSpec) -> dict:
    out: dict[str, Any] = {
        "command": spec.command,
        "ring": ring_to_dict(spec.ring),
        "family": [_grade_literal(a) for a in spec.family],
        "level": spec.level,
        "cap": spec.cap,
        "format": spec.format,
        "seed": spec.seed,
        "workers": spec.workers,
        "samples": spec.samples,
        "identities": list(spec.identities),
    }
    if spec.ideal is not None:
        out["ideal"] = ideal_to_dict(spec.ideal)
    if spec.levels is not None:
        out["levels"] = list(spec.levels)
    if spec.lam is not None:
        out["lambda"] = _grade_literal(spec.lam)
    if spec.matrices:
        out["matrices"] = [
            {
                "family": [_grade_literal(a) for a in m.family],
                "degree": _grade_literal(m.degree),
                "entries": m.to_literal(),
            }
            for m in spec.matrices
        ]
    if spec.elementary:
        out["elementary"] = [{"i": g.i + 1, "j": g.j + 1, "r": g.r.literal()} for g in spec.elementary]
    return out


def emit_job(spec: JobSpec) -> str:
    return tomli_w.dumps(job_to_dict(spec))


def load_job(path: str, command: Optional[str] = None) -> JobSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise JobError(f"cannot read job file: {exc}", field="path") from exc
    return parse_job(text, command)

