"""
Problem files: pydantic schema, parsing, and conversion into core objects.

Exact scalars travel as strings ("1/2", "-3/4*i", "1+2*i"); matrices as lists
of rows. See docs/FORMATS.md.
"""

import json
import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from app.core import linalg
from app.core.errors import ProblemFileError
from app.core.holo_complex import ComplexFamily, GaugeProfile, IndicialInput, build_indicial, generate_gauge_complex
from app.core.ibc_variety import IBCProblem
from app.core.linalg import Matrix
from app.core.matrix_series import MapFamily
from app.core.mellin_bridge import LogSection, StripConfig
from app.core.scalar_series import ExactScalar, as_scalar

logger = logging.getLogger(__name__)

VERSION = "germcoh/1"
PAYLOADS = ("complex", "indicial", "strip", "ibc", "generator")

MatrixRows = List[List[str]]


class MapSpec(BaseModel):
    coeffs: List[MatrixRows]
    valuation: int = 0
    order: Optional[int] = None


class ComplexSpec(BaseModel):
    dims: List[int]
    maps: List[MapSpec]
    center: str = "0"
    grams: Optional[List[Optional[MatrixRows]]] = None


class IndicialSpec(BaseModel):
    bP: List[MatrixRows]
    Lambda: List[MatrixRows]
    gamma: str = "1/2"
    anchor: int = 0
    center: str = "0"
    dims: Optional[List[int]] = None
    grams: Optional[List[Optional[MatrixRows]]] = None


class LogSectionSpec(BaseModel):
    sigma0: str
    coeffs: List[List[str]]


class StripSpec(BaseModel):
    indicial: IndicialSpec
    points: List[str]
    u: List[LogSectionSpec] = Field(default_factory=list)
    v: List[LogSectionSpec] = Field(default_factory=list)


class IBCSpec(BaseModel):
    maps: List[MatrixRows]
    dims: Optional[List[int]] = None
    candidates: Optional[List[MatrixRows]] = None
    base: Optional[List[MatrixRows]] = None
    samples: int = Field(100, ge=0)
    fold: bool = False


class ProfileSpec(BaseModel):
    dims: List[int]
    blocks: List[Tuple[int, int]] = Field(default_factory=list)
    gauge_degree: int = Field(2, ge=0)
    center: str = "0"
    trivial_gauge: bool = False


class GeneratorSpec(BaseModel):
    seed: int = 0
    count: Optional[int] = Field(None, ge=1)
    profile: Optional[ProfileSpec] = None

    @model_validator(mode="after")
    def _one_mode(self):
        if (self.count is None) == (self.profile is None):
            raise ValueError("generator needs exactly one of count (corpus) or profile (single complex)")
        return self


class Options(BaseModel):
    depth: Optional[int] = Field(None, ge=1)
    checked: Optional[bool] = None
    seed: Optional[int] = None
    candidates: Optional[List[str]] = None
    degree: Optional[int] = Field(None, ge=0)
    order: Optional[int] = Field(None, ge=1)
    workers: Optional[int] = Field(None, ge=1)


class ProblemFile(BaseModel):
    version: str = VERSION
    complex: Optional[ComplexSpec] = None
    indicial: Optional[IndicialSpec] = None
    strip: Optional[StripSpec] = None
    ibc: Optional[IBCSpec] = None
    generator: Optional[GeneratorSpec] = None
    options: Options = Field(default_factory=Options)

    @field_validator("version")
    @classmethod
    def _known_version(cls, value: str) -> str:
        if value != VERSION:
            raise ValueError(f"unsupported problem file version {value!r}, expected {VERSION!r}")
        return value

    @model_validator(mode="after")
    def _single_payload(self):
        present = [name for name in PAYLOADS if getattr(self, name) is not None]
        if len(present) != 1:
            raise ValueError(f"exactly one payload of {', '.join(PAYLOADS)} is required, found {present or 'none'}")
        return self

    @property
    def kind(self) -> str:
        return next(name for name in PAYLOADS if getattr(self, name) is not None)


def load_problem(source: Union[str, bytes, Dict[str, Any]]) -> ProblemFile:
    """Parse JSON text or an already-decoded mapping into a ProblemFile."""
    try:
        data = json.loads(source) if isinstance(source, (str, bytes)) else source
        return ProblemFile.model_validate(data)
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"problem file is not valid JSON: {e}")
    except ValidationError as e:
        raise ProblemFileError("problem file does not match the schema", {"errors": json.loads(e.json())})


def _scalar(text: str) -> ExactScalar:
    try:
        return as_scalar(text)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise ProblemFileError(f"cannot parse exact scalar {text!r}: {e}")


def _matrix(rows: MatrixRows, n_rows: Optional[int] = None, n_cols: Optional[int] = None) -> Matrix:
    try:
        return linalg.to_matrix(rows, n_rows, n_cols)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise ProblemFileError(f"cannot parse matrix: {e}")


def _grams(grams: Optional[List[Optional[MatrixRows]]], dims: List[int]) -> Optional[List[Optional[Matrix]]]:
    if grams is None:
        return None
    if len(grams) != len(dims):
        raise ProblemFileError(f"{len(dims)} spaces need {len(dims)} Gram entries, got {len(grams)}")
    return [None if G is None else _matrix(G, n, n) for G, n in zip(grams, dims)]


def build_complex(spec: ComplexSpec) -> ComplexFamily:
    if len(spec.maps) != len(spec.dims) - 1:
        raise ProblemFileError(f"{len(spec.dims)} dims need {len(spec.dims) - 1} maps, got {len(spec.maps)}")
    center = _scalar(spec.center)
    maps = []
    for q, m in enumerate(spec.maps):
        shape = (spec.dims[q + 1], spec.dims[q])
        mats = [_matrix(c, *shape) for c in m.coeffs]
        maps.append(MapFamily.build(mats, m.valuation, m.order, center, shape))
    return ComplexFamily.create(spec.dims, maps, center, _grams(spec.grams, spec.dims))


def build_indicial_input(spec: IndicialSpec) -> IndicialInput:
    if len(spec.bP) != len(spec.Lambda):
        raise ProblemFileError("bP and Lambda need the same number of maps")
    if spec.dims is not None:
        shapes = [(spec.dims[q + 1], spec.dims[q]) for q in range(len(spec.bP))]
    else:
        shapes = [(None, None)] * len(spec.bP)
    bP = [_matrix(b, *s) for b, s in zip(spec.bP, shapes)]
    Lam = [_matrix(b, *s) for b, s in zip(spec.Lambda, shapes)]
    try:
        gamma = Fraction(spec.gamma)
    except (ValueError, ZeroDivisionError) as e:
        raise ProblemFileError(f"gamma must be rational: {e}")
    inp = IndicialInput(bP, Lam, gamma, spec.anchor)
    inp.grams = _grams(spec.grams, inp.dims)
    return inp


def build_log_sections(specs: List[LogSectionSpec]) -> List[LogSection]:
    sections = []
    for s in specs:
        try:
            sections.append(LogSection.from_lists(s.sigma0, s.coeffs))
        except (ValueError, TypeError, ZeroDivisionError) as e:
            raise ProblemFileError(f"cannot parse log section at {s.sigma0!r}: {e}")
    return sections


def build_strip(spec: StripSpec) -> Tuple[IndicialInput, StripConfig, List[LogSection], List[LogSection]]:
    inp = build_indicial_input(spec.indicial)
    cfg = StripConfig(inp.gamma, [_scalar(p) for p in spec.points])
    return inp, cfg, build_log_sections(spec.u), build_log_sections(spec.v)


def build_ibc(spec: IBCSpec) -> IBCProblem:
    if spec.dims is not None:
        if len(spec.dims) != len(spec.maps) + 1:
            raise ProblemFileError(f"{len(spec.maps)} maps need {len(spec.maps) + 1} dims")
        maps = [_matrix(a, spec.dims[q + 1], spec.dims[q]) for q, a in enumerate(spec.maps)]
    elif all(spec.maps) and spec.maps:
        maps = [_matrix(a) for a in spec.maps]
    else:
        raise ProblemFileError("maps with an empty side need explicit dims")
    problem = IBCProblem.create(maps, dims=spec.dims)
    if spec.candidates is not None:
        problem = problem.with_candidates(
            [_matrix(D, problem.dims[q], _cols(D)) for q, D in enumerate(spec.candidates)]
        )
    return problem


def build_base(spec: IBCSpec, problem: IBCProblem) -> List[Matrix]:
    if spec.base is None:
        raise ProblemFileError("chart equations need a base tuple")
    return [_matrix(B, problem.dims[q], _cols(B)) for q, B in enumerate(spec.base)]


def _cols(rows: MatrixRows) -> int:
    return len(rows[0]) if rows else 0


def build_profile(spec: ProfileSpec) -> GaugeProfile:
    return GaugeProfile(list(spec.dims), [tuple(b) for b in spec.blocks], spec.gauge_degree, _scalar(spec.center), spec.trivial_gauge)


class RunOptions(BaseModel):
    """Effective options: command-line overrides, then the file, then settings."""

    depth: Optional[int] = None
    checked: bool = True
    seed: int = 0
    candidates: Optional[List[str]] = None
    degree: Optional[int] = None
    order: Optional[int] = None
    workers: int = 1


def resolve_options(problem: Optional[ProblemFile], settings: Any, **overrides: Any) -> RunOptions:
    merged: Dict[str, Any] = {
        "checked": settings.checked,
        "seed": settings.seed,
        "workers": settings.workers,
    }
    if problem is not None:
        merged.update({k: v for k, v in problem.options.model_dump().items() if v is not None})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return RunOptions(**merged)


def complex_from_problem(problem: ProblemFile) -> Tuple[ComplexFamily, Optional[Dict[str, Any]]]:
    """The complex a payload describes, with generator ground truth when there is one."""
    if problem.complex is not None:
        return build_complex(problem.complex), None
    if problem.indicial is not None:
        return build_indicial(build_indicial_input(problem.indicial), _scalar(problem.indicial.center)), None
    if problem.generator is not None and problem.generator.profile is not None:
        return generate_gauge_complex(problem.generator.seed, build_profile(problem.generator.profile))
    raise ProblemFileError(f"a {problem.kind} payload does not describe a single complex")
