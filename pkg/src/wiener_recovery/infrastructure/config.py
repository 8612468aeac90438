"""
Experiment configuration: JSON loading, schema validation and hashing.

Every problem found in a payload is collected before ``ConfigError`` is
raised, so a single run reports all diagnostics at once.
"""

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Mapping, TypeVar

from wiener_recovery._harness import ConfigError
from wiener_recovery.domain.lowerbound import (
    DEFAULT_LOWER_BOUND_CAP,
    DEFAULT_WITNESS_SAMPLES,
)
from wiener_recovery.domain.models import (
    ClassSpec,
    ClassVariant,
    EtaMode,
    HoelderConstants,
    QuadratureConfig,
    SolverConfig,
)
from wiener_recovery.domain.multiindex import DEFAULT_CARDINALITY_CAP
from wiener_recovery.domain.recovery import DEFAULT_GAMMA
from wiener_recovery.domain.sampling import DEFAULT_MATRIX_ENTRY_CAP
from wiener_recovery.domain.wiener import DEFAULT_RADIUS_CAP

CONFIG_VERSION = 1
MAX_SEED = (1 << 64) - 1

T = TypeVar("T")
E = TypeVar("E", bound=Enum)
_MISSING = object()


@dataclass(frozen=True)
class ClassConfig:
    """A function class without its dimension."""

    variant: ClassVariant = ClassVariant.LOG_CLASS
    smoothness: float | None = None
    alpha: float | None = None
    c1: float = 1.5
    c2: float = 3.0

    def to_spec(self, dimension: int) -> ClassSpec:
        return ClassSpec(
            variant=self.variant,
            dimension=dimension,
            smoothness=self.smoothness,
            alpha=self.alpha,
            hoelder_constants=HoelderConstants(self.c1, self.c2),
        )


@dataclass(frozen=True)
class GeneratorSettings:
    """Extremal class members used as ground truths by ``recover``."""

    support_budget: int = 5
    max_freq: int = 6


@dataclass(frozen=True)
class FixedPlanSettings:
    """Explicit (m_trunc, s, m) replacing the planned parameters."""

    truncation_radius: int
    s: int
    m: int


@dataclass(frozen=True)
class CalibrationSettings:
    """Sample-count calibration run by ``recover`` before its trials."""

    enabled: bool = False
    members: int = 3
    seeds: int = 2
    max_doublings: int = 8


@dataclass(frozen=True)
class PhaseTransitionSettings:
    dimension: int = 2
    truncation_radius: int = 2
    sparsities: tuple[int, ...] = (1, 2, 3)
    sample_counts: tuple[int, ...] = (5, 10, 20, 40, 60)
    trials: int = 20
    success_tol: float = 1e-4


@dataclass(frozen=True)
class LowerBoundSettings:
    dimension: int = 2
    ranks: tuple[int, ...] = (0, 6, 12)
    bpdn_samples: int = DEFAULT_WITNESS_SAMPLES


@dataclass(frozen=True)
class BoundTableSettings:
    classes: tuple[ClassConfig, ...] = (ClassConfig(),)
    dimensions: tuple[int, ...] = (1, 2, 4, 8)
    epsilons: tuple[float, ...] = (0.2, 0.5, 0.9)
    norms: tuple[float, ...] = (2.0,)


@dataclass(frozen=True)
class CapSettings:
    cardinality: int = DEFAULT_CARDINALITY_CAP
    radius: int = DEFAULT_RADIUS_CAP
    matrix_entries: int = DEFAULT_MATRIX_ENTRY_CAP
    lower_bound: int = DEFAULT_LOWER_BOUND_CAP


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment description shared by all commands."""

    version: int = CONFIG_VERSION
    seed: int = 0
    dimension: int = 2
    function_class: ClassConfig = field(default_factory=ClassConfig)
    p: float = 2.0
    epsilons: tuple[float, ...] = (0.5,)
    trials: int = 3
    c_universal: float = 1.0
    gamma: float = DEFAULT_GAMMA
    eta_mode: EtaMode = EtaMode.CLASS
    generator: GeneratorSettings = field(default_factory=GeneratorSettings)
    fixed_plan: FixedPlanSettings | None = None
    calibration: CalibrationSettings = field(default_factory=CalibrationSettings)
    solver: SolverConfig = field(default_factory=SolverConfig)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    phase_transition: PhaseTransitionSettings = field(
        default_factory=PhaseTransitionSettings
    )
    lower_bound: LowerBoundSettings = field(default_factory=LowerBoundSettings)
    bound_table: BoundTableSettings = field(default_factory=BoundTableSettings)
    caps: CapSettings = field(default_factory=CapSettings)

    @property
    def spec(self) -> ClassSpec:
        return self.function_class.to_spec(self.dimension)

    def with_overrides(self, seed: int | None = None) -> "ExperimentConfig":
        """Apply command-line overrides."""
        if seed is None:
            return self
        if not (0 <= seed <= MAX_SEED):
            raise ConfigError([f"seed must lie in [0, 2^64), got {seed}"])
        return dataclasses.replace(self, seed=seed)

    def to_json(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


class _Section:
    """Typed reader over one JSON object that records every problem it meets."""

    def __init__(self, payload: Any, path: str, diagnostics: list[str]):
        if payload is _MISSING:
            payload = {}
        elif not isinstance(payload, Mapping):
            diagnostics.append(
                f"{path or 'config'}: expected an object, got {type(payload).__name__}"
            )
            payload = {}
        self.payload = payload
        self.path = path
        self.diagnostics = diagnostics
        self.seen: set[str] = set()

    def _name(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def fail(self, key: str, message: str) -> None:
        self.diagnostics.append(f"{self._name(key)}: {message}")

    def _get(self, key: str) -> Any:
        self.seen.add(key)
        return self.payload.get(key, _MISSING)

    def has(self, key: str) -> bool:
        return key in self.payload

    def integer(
        self,
        key: str,
        default: int,
        minimum: int | None = None,
        maximum: int | None = None,
    ) -> int:
        value = self._get(key)
        if value is _MISSING:
            return default
        return self._check_integer(key, value, default, minimum, maximum)

    def _check_integer(
        self,
        key: str,
        value: Any,
        default: int,
        minimum: int | None,
        maximum: int | None,
    ) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(key, f"expected an integer, got {value!r}")
            return default
        if minimum is not None and value < minimum:
            self.fail(key, f"must be >= {minimum}, got {value}")
            return default
        if maximum is not None and value > maximum:
            self.fail(key, f"must be <= {maximum}, got {value}")
            return default
        return value

    def flag(self, key: str, default: bool) -> bool:
        value = self._get(key)
        if value is _MISSING:
            return default
        if not isinstance(value, bool):
            self.fail(key, f"expected true or false, got {value!r}")
            return default
        return value

    def number(
        self,
        key: str,
        default: float,
        check: Callable[[float], bool] = lambda _: True,
        requirement: str = "",
    ) -> float:
        value = self._get(key)
        if value is _MISSING:
            return default
        return self._check_number(key, value, default, check, requirement)

    def optional_number(
        self, key: str, check: Callable[[float], bool], requirement: str
    ) -> float | None:
        value = self._get(key)
        if value is _MISSING or value is None:
            return None
        return self._check_number(key, value, math.nan, check, requirement)

    def _check_number(
        self,
        key: str,
        value: Any,
        default: float,
        check: Callable[[float], bool],
        requirement: str,
    ) -> float:
        if (
            isinstance(value, bool)
            or not isinstance(value, (int, float))
            or not math.isfinite(value)
        ):
            self.fail(key, f"expected a finite number, got {value!r}")
            return default
        if not check(float(value)):
            self.fail(key, f"must be {requirement}, got {value}")
            return default
        return float(value)

    def integers(
        self, key: str, default: tuple[int, ...], minimum: int | None = None
    ) -> tuple[int, ...]:
        values = self._list(key)
        if values is None:
            return default
        checked = [
            self._check_integer(f"{key}[{i}]", v, -1, minimum, None)
            for i, v in enumerate(values)
        ]
        return tuple(checked)

    def numbers(
        self,
        key: str,
        default: tuple[float, ...],
        check: Callable[[float], bool],
        requirement: str,
    ) -> tuple[float, ...]:
        values = self._list(key)
        if values is None:
            return default
        return tuple(
            self._check_number(f"{key}[{i}]", v, math.nan, check, requirement)
            for i, v in enumerate(values)
        )

    def _list(self, key: str) -> list[Any] | None:
        value = self._get(key)
        if value is _MISSING:
            return None
        if not isinstance(value, list) or not value:
            self.fail(key, f"expected a nonempty list, got {value!r}")
            return None
        return value

    def choice(self, key: str, enum: type[E], default: E) -> E:
        value = self._get(key)
        if value is _MISSING:
            return default
        try:
            return enum(value)
        except ValueError:
            allowed = ", ".join(repr(member.value) for member in enum)
            self.fail(key, f"expected one of {allowed}, got {value!r}")
            return default

    def section(self, key: str) -> "_Section":
        return _Section(self._get(key), self._name(key), self.diagnostics)

    def sections(self, key: str) -> list["_Section"] | None:
        values = self._list(key)
        if values is None:
            return None
        return [
            _Section(v, f"{self._name(key)}[{i}]", self.diagnostics)
            for i, v in enumerate(values)
        ]

    def close(self) -> None:
        for key in sorted(set(self.payload) - self.seen):
            self.fail(key, "unknown key")


def _positive(value: float) -> bool:
    return value > 0


def _unit_open(value: float) -> bool:
    return 0 < value < 1


def _read_class(section: _Section) -> ClassConfig:
    config = ClassConfig(
        variant=section.choice("variant", ClassVariant, ClassVariant.LOG_CLASS),
        smoothness=section.optional_number("smoothness", lambda s: s > 0.5, "> 1/2"),
        alpha=section.optional_number("alpha", lambda a: 0 < a <= 1, "in (0, 1]"),
        c1=section.number("c1", 1.5, _positive, "> 0"),
        c2=section.number("c2", 3.0, _positive, "> 0"),
    )
    section.close()
    return _build(section, "variant", lambda: _checked_class(config), config)


def _checked_class(config: ClassConfig) -> ClassConfig:
    config.to_spec(1)
    return config


def _build(section: _Section, key: str, factory: Callable[[], T], fallback: T) -> T:
    try:
        return factory()
    except ValueError as error:
        section.fail(key, str(error))
        return fallback


def _read_solver(section: _Section) -> SolverConfig:
    defaults = SolverConfig()
    values = dict(
        gap_tol=section.number("gap_tol", defaults.gap_tol, _positive, "> 0"),
        feas_tol=section.number("feas_tol", defaults.feas_tol, _positive, "> 0"),
        max_iter=section.integer("max_iter", defaults.max_iter, minimum=1),
        power_iterations=section.integer(
            "power_iterations", defaults.power_iterations, minimum=1
        ),
        step_safety=section.number(
            "step_safety", defaults.step_safety, _unit_open, "in (0, 1)"
        ),
        relaxation=section.number(
            "relaxation", defaults.relaxation, lambda r: 0 <= r <= 1, "in [0, 1]"
        ),
        check_every=section.integer("check_every", defaults.check_every, minimum=1),
        support_tol=section.number(
            "support_tol", defaults.support_tol, _unit_open, "in (0, 1)"
        ),
    )
    section.close()
    return _build(section, "gap_tol", lambda: SolverConfig(**values), defaults)


def _read_quadrature(section: _Section) -> QuadratureConfig:
    defaults = QuadratureConfig()
    config = QuadratureConfig(
        n=section.integer("n", defaults.n, minimum=2),
        grid_per_dim=section.integer("grid_per_dim", defaults.grid_per_dim, minimum=1),
        seed=section.integer("seed", defaults.seed, minimum=0, maximum=MAX_SEED),
        max_grid_points=section.integer(
            "max_grid_points", defaults.max_grid_points, minimum=1
        ),
    )
    section.close()
    return config


def _read_fixed_plan(section: _Section) -> FixedPlanSettings:
    config = FixedPlanSettings(
        truncation_radius=section.integer("truncation_radius", 1, minimum=0),
        s=section.integer("s", 2, minimum=2),
        m=section.integer("m", 1, minimum=1),
    )
    for key in ("truncation_radius", "s", "m"):
        if not section.has(key):
            section.fail(key, "required")
    section.close()
    return config


def _read_calibration(section: _Section) -> CalibrationSettings:
    defaults = CalibrationSettings()
    config = CalibrationSettings(
        enabled=section.flag("enabled", defaults.enabled),
        members=section.integer("members", defaults.members, minimum=1),
        seeds=section.integer("seeds", defaults.seeds, minimum=1),
        max_doublings=section.integer(
            "max_doublings", defaults.max_doublings, minimum=0
        ),
    )
    section.close()
    return config


def _read_phase_transition(section: _Section) -> PhaseTransitionSettings:
    defaults = PhaseTransitionSettings()
    config = PhaseTransitionSettings(
        dimension=section.integer("d", defaults.dimension, minimum=1),
        truncation_radius=section.integer(
            "truncation_radius", defaults.truncation_radius, minimum=0
        ),
        sparsities=section.integers("sparsities", defaults.sparsities, minimum=1),
        sample_counts=section.integers(
            "sample_counts", defaults.sample_counts, minimum=1
        ),
        trials=section.integer("trials", defaults.trials, minimum=1),
        success_tol=section.number(
            "success_tol", defaults.success_tol, _positive, "> 0"
        ),
    )
    cardinality = (2 * config.truncation_radius + 1) ** config.dimension
    if any(s > cardinality for s in config.sparsities):
        section.fail("sparsities", f"every sparsity must be <= #Λ = {cardinality}")
    section.close()
    return config


def _read_lower_bound(section: _Section) -> LowerBoundSettings:
    defaults = LowerBoundSettings()
    config = LowerBoundSettings(
        dimension=section.integer("d", defaults.dimension, minimum=1),
        ranks=section.integers("ranks", defaults.ranks, minimum=0),
        bpdn_samples=section.integer("bpdn_samples", defaults.bpdn_samples, minimum=1),
    )
    section.close()
    return config


def _read_bound_table(section: _Section) -> BoundTableSettings:
    defaults = BoundTableSettings()
    class_sections = section.sections("classes")
    config = BoundTableSettings(
        classes=(
            defaults.classes
            if class_sections is None
            else tuple(_read_class(s) for s in class_sections)
        ),
        dimensions=section.integers("dimensions", defaults.dimensions, minimum=1),
        epsilons=section.numbers(
            "epsilons", defaults.epsilons, _unit_open, "in (0, 1)"
        ),
        norms=section.numbers("p", defaults.norms, lambda p: p >= 2, ">= 2"),
    )
    section.close()
    return config


def _read_caps(section: _Section) -> CapSettings:
    defaults = CapSettings()
    config = CapSettings(
        cardinality=section.integer("cardinality", defaults.cardinality, minimum=1),
        radius=section.integer("radius", defaults.radius, minimum=1),
        matrix_entries=section.integer(
            "matrix_entries", defaults.matrix_entries, minimum=1
        ),
        lower_bound=section.integer("lower_bound", defaults.lower_bound, minimum=1),
    )
    section.close()
    return config


def parse_config(payload: Any) -> ExperimentConfig:
    """
    Validate a decoded JSON payload.

    Raises:
        ConfigError: With every schema diagnostic found
    """
    diagnostics: list[str] = []
    root = _Section(payload, "", diagnostics)
    version = root.integer("version", -1)
    if version != CONFIG_VERSION:
        root.fail(
            "version",
            f"expected {CONFIG_VERSION}, got {root.payload.get('version')!r}",
        )
    fixed_section = root.section("fixed_plan") if root.has("fixed_plan") else None
    config = ExperimentConfig(
        version=CONFIG_VERSION,
        seed=root.integer("seed", 0, minimum=0, maximum=MAX_SEED),
        dimension=root.integer("d", 2, minimum=1),
        function_class=_read_class(root.section("class")),
        p=root.number("p", 2.0, lambda p: p >= 2, ">= 2"),
        epsilons=root.numbers("epsilons", (0.5,), _unit_open, "in (0, 1)"),
        trials=root.integer("trials", 3, minimum=1),
        c_universal=root.number("c_universal", 1.0, _positive, "> 0"),
        gamma=root.number("gamma", DEFAULT_GAMMA, _unit_open, "in (0, 1)"),
        eta_mode=root.choice("eta_mode", EtaMode, EtaMode.CLASS),
        generator=_read_generator(root.section("generator")),
        fixed_plan=None if fixed_section is None else _read_fixed_plan(fixed_section),
        calibration=_read_calibration(root.section("calibration")),
        solver=_read_solver(root.section("solver")),
        quadrature=_read_quadrature(root.section("quadrature")),
        phase_transition=_read_phase_transition(root.section("phase_transition")),
        lower_bound=_read_lower_bound(root.section("lower_bound")),
        bound_table=_read_bound_table(root.section("bound_table")),
        caps=_read_caps(root.section("caps")),
    )
    root.close()
    frequencies = (2 * config.generator.max_freq + 1) ** config.dimension
    if config.generator.support_budget > frequencies:
        diagnostics.append(
            f"generator.support_budget: {config.generator.support_budget} exceeds the "
            f"{frequencies} frequencies available"
        )
    if diagnostics:
        raise ConfigError(diagnostics)
    return config


def _read_generator(section: _Section) -> GeneratorSettings:
    defaults = GeneratorSettings()
    config = GeneratorSettings(
        support_budget=section.integer(
            "support_budget", defaults.support_budget, minimum=1
        ),
        max_freq=section.integer("max_freq", defaults.max_freq, minimum=0),
    )
    section.close()
    return config


def load_config(path: Path) -> ExperimentConfig:
    """
    Load and validate a JSON experiment configuration.

    Raises:
        ConfigError: If the file is missing, is not JSON, or fails validation
    """
    if not path.exists():
        raise ConfigError([f"config file {path} does not exist"])
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as error:
        raise ConfigError([f"{path}: not valid JSON ({error})"]) from error
    return parse_config(payload)


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON of the validated configuration."""
    return hashlib.sha256(canonical_json(config.to_json()).encode("utf-8")).hexdigest()
