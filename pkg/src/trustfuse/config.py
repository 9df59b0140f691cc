"""Experiment configuration: YAML loading, validation, scenario presets."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .errors import ConfigError
from .simulator import SCHEMES, SimConfig

# Scenario presets pin the sweep axes and placement of the evaluation
# experiments. The data-trust and comparison scenarios route every user to
# the tracked area so the fused per-area evidence is non-trivial.
PMU_SWEEP = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]
F_SWEEP = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.55, 0.6]
COMPARE_PMU = [0.1, 0.3, 0.5, 0.7]
DEFAULT_SEEDS = list(range(20))

SCENARIOS: dict[str, dict] = {
    "fig3": {},
    "fig4": {},
    # fig5 degrades the channel's true error rates while the trust module
    # keeps its nominal tuning.
    "fig5": {"f": F_SWEEP, "sim": {"assumed_f_p": 0.2, "assumed_f_n": 0.2}},
    "fig6a": {"sim": {"epochs": 90, "change_epoch": 10,
                      "change_new_score": 0.05}},
    "fig6b": {"sim": {"epochs": 160, "change_epoch": 20,
                      "change_new_score": 0.05}},
    "fig7": {"pmu": PMU_SWEEP,
             "sim": {"p_tracked": 1.0, "tracked_truth": 1}},
    "fig8": {"pmu": PMU_SWEEP,
             "sim": {"p_tracked": 1.0, "tracked_truth": 2}},
    "fig9": {"scheme": "both", "sim": {"p_tracked": 1.0, "tracked_truth": 1}},
    "fig10": {"scheme": "both", "pmu": COMPARE_PMU,
              "sim": {"p_tracked": 1.0, "tracked_truth": 1}},
    "fig11": {"scheme": "both", "pmu": COMPARE_PMU,
              "sim": {"p_tracked": 1.0, "tracked_truth": 1}},
    "custom": {},
}

_SIM_FIELDS = {f.name for f in dataclasses.fields(SimConfig)}
_TOP_KEYS = {"scenario", "scheme", "seeds", "pmu", "f", "out_dir", "sim"}


@dataclass
class ExperimentSpec:
    scenario: str = "custom"
    base: SimConfig = field(default_factory=SimConfig)
    pmu_list: list[float] = field(default_factory=lambda: [SimConfig.pmu])
    f_list: list[float] = field(default_factory=lambda: [SimConfig.f_p])
    seeds: list[int] = field(default_factory=lambda: list(DEFAULT_SEEDS))
    scheme: str = "proposed"
    out_dir: Path = Path("out")

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; "
                              f"choose from {sorted(SCENARIOS)}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        for name, lst in (("pmu", self.pmu_list), ("f", self.f_list),
                          ("seeds", self.seeds)):
            if not lst:
                raise ConfigError(f"sweep list {name!r} must be nonempty")
        for p in self.pmu_list:
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"pmu={p} outside [0,1]")
        for f in self.f_list:
            if not 0.0 <= f < 1.0:
                raise ConfigError(f"f={f} outside [0,1)")


def _build_sim(overrides: dict) -> SimConfig:
    unknown = set(overrides) - _SIM_FIELDS
    if unknown:
        raise ConfigError(f"unknown sim key(s): {sorted(unknown)}")
    coerced = {}
    for key, value in overrides.items():
        if isinstance(value, list):
            value = tuple(value)
        coerced[key] = value
    try:
        return SimConfig(**coerced)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid sim config: {exc}") from exc


def parse_seeds(spec) -> list[int]:
    """Accept a list of ints or a range string like '0..19'."""
    if isinstance(spec, str):
        if ".." not in spec:
            raise ConfigError(f"seed range {spec!r} must look like 'a..b'")
        lo, hi = spec.split("..", 1)
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError as exc:
            raise ConfigError(f"bad seed range {spec!r}") from exc
    if isinstance(spec, int):
        return [spec]
    return [int(s) for s in spec]


def apply_scenario(spec: ExperimentSpec) -> ExperimentSpec:
    """Overlay the scenario preset's axes and sim overrides."""
    preset = SCENARIOS[spec.scenario]
    out = dataclasses.replace(spec)
    if "sim" in preset:
        out.base = replace(out.base, **preset["sim"])
    if "pmu" in preset:
        out.pmu_list = list(preset["pmu"])
    if "f" in preset:
        out.f_list = list(preset["f"])
    if "scheme" in preset:
        out.scheme = preset["scheme"]
    return out


def load_config(path: str | Path) -> ExperimentSpec:
    """Parse and validate a YAML experiment file; defaults fill unset fields."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    raw = yaml.safe_load(path.read_text())
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")

    base = _build_sim(raw.get("sim", {}) or {})
    spec = ExperimentSpec(
        scenario=raw.get("scenario", "custom"),
        base=base,
        pmu_list=[float(p) for p in _as_list(raw.get("pmu", base.pmu))],
        f_list=[float(f) for f in _as_list(raw.get("f", base.f_p))],
        seeds=parse_seeds(raw.get("seeds", DEFAULT_SEEDS)),
        scheme=raw.get("scheme", "proposed"),
        out_dir=Path(raw.get("out_dir", "out")),
    )
    return apply_scenario(spec)


def _as_list(value) -> list:
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]
