"""Scenario assembly from flat sectioned key=value config files.

Config files are INI-style with ``[tx]``, ``[rx]``, ``[body]``, ``[link]``
and optional ``[channel]``, ``[sweep]``, ``[resonance]`` sections.  Keys
carry their SI unit as a suffix (``radius_m``, ``load_f``, ``k_f_per_m``).
Every channel quantity may be given either directly as a capacitance or
through the geometric inputs that generate it; when both are present they
must agree to 1e-9 relative and the geometric derivation is the one stored.

Example (geometric form)::

    [tx]
    radius_m = 0.03
    plate_separation_m = 0.005
    shadowing_x = 0.5

    [rx]
    radius_m = 0.03
    plate_separation_m = 0.005
    shadowing_x = 0.5
    fringe_f = 0.75e-12
    load_f = 10e-12

    [body]
    dielectric_thickness_m = 0.40
    dielectric_table = dielectric_cb.csv

    [link]
    k_f_per_m = 2.0e-12
    separation_m = 0.10
"""

from __future__ import annotations

import configparser
import dataclasses
import math
import os
import warnings
from dataclasses import dataclass
from pathlib import Path

from .constants import DECOUPLING_DISTANCE_M, EQS_MAX_FREQUENCY_HZ
from .geometry import (
    CouplingConstant,
    DeviceGeometry,
    coupling_capacitance,
    ground_to_body_capacitance,
    plate_to_plate_capacitance,
    return_path_capacitance,
)
from .profiles import ShadowingProfile, shadowing_factor
from .resonance import (
    DEFAULT_GRID_MAX_HZ,
    DEFAULT_GRID_MIN_HZ,
    DEFAULT_GRID_POINTS,
    DEFAULT_SERIES_RESISTANCE_OHM,
    DielectricTable,
    body_capacitance_lookup,
)
from .transfer import ChannelScenario, GeometricProvenance

DEFAULT_FREQUENCY_HZ = 1e5

# Direct values must agree with their geometric derivation to this relative
# tolerance when a config supplies both.
CONSISTENCY_REL_TOL = 1e-9

TABLE_DIR_ENV = "HBC_TABLE_DIR"


class ConfigError(ValueError):
    """Invalid, missing or inconsistent configuration input."""


class EqsRegimeWarning(UserWarning):
    """Configured frequency lies above the electro-quasistatic band."""


@dataclass(frozen=True)
class SideConfig:
    """Raw per-device inputs; ``None`` means not configured."""

    radius_m: float | None = None
    plate_separation_m: float | None = None
    disc_height_m: float = 0.0
    shadowing_x: float | None = None
    position_s: float | None = None
    return_path_f: float | None = None
    # Receiver-only inputs.
    fringe_f: float | None = None
    ground_body_f: float | None = None
    load_f: float | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    """Raw scenario inputs, one level above :class:`ChannelScenario`."""

    tx: SideConfig = SideConfig()
    rx: SideConfig = SideConfig()
    c_b_f: float | None = None
    dielectric_thickness_m: float | None = None
    dielectric_table: str | None = None
    segment: str | None = None
    shadowing_anchors: tuple[tuple[float, float], ...] | None = None
    segment_length_m: float | None = None
    coupling_f: float | None = None
    k_f_per_m: float | None = None
    separation_m: float | None = None
    decouple_m: float = DECOUPLING_DISTANCE_M
    frequency_hz: float = DEFAULT_FREQUENCY_HZ
    base_dir: Path | None = None

    def profile(self) -> ShadowingProfile | None:
        if self.shadowing_anchors is None:
            return None
        return ShadowingProfile(self.segment or "custom", self.shadowing_anchors)


@dataclass(frozen=True)
class SweepSection:
    kind: str
    start: float
    stop: float
    steps: int


@dataclass(frozen=True)
class ResonanceSection:
    inductance_h: float
    series_resistance_ohm: float = DEFAULT_SERIES_RESISTANCE_OHM
    capacitance_f: float | None = None
    f_min_hz: float = DEFAULT_GRID_MIN_HZ
    f_max_hz: float = DEFAULT_GRID_MAX_HZ
    points: int = DEFAULT_GRID_POINTS


@dataclass(frozen=True)
class ParsedConfig:
    path: Path
    scenario: ScenarioConfig
    sweep: SweepSection | None = None
    resonance: ResonanceSection | None = None


_SIDE_KEYS = {
    "radius_m", "plate_separation_m", "disc_height_m", "shadowing_x",
    "position_s", "return_path_f",
}
_RX_ONLY_KEYS = {"fringe_f", "ground_body_f", "load_f"}
_ALLOWED_KEYS = {
    "tx": _SIDE_KEYS,
    "rx": _SIDE_KEYS | _RX_ONLY_KEYS,
    "body": {
        "c_b_f", "dielectric_thickness_m", "dielectric_table", "segment",
        "shadowing_anchors", "segment_length_m",
    },
    "link": {"coupling_f", "k_f_per_m", "separation_m", "decouple_m"},
    "channel": {"frequency_hz"},
    "sweep": {"kind", "min", "max", "steps"},
    "resonance": {
        "inductance_h", "series_resistance_ohm", "capacitance_f",
        "f_min_hz", "f_max_hz", "points",
    },
}


def _parse_float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from exc


def _parse_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: not an integer: {raw!r}") from exc


def _parse_anchors(section: str, raw: str) -> tuple[tuple[float, float], ...]:
    """Parse `s:x, s:x, ...` anchor lists."""
    anchors = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 2:
            raise ConfigError(
                f"[{section}] shadowing_anchors: expected 's:x' pairs, got {item!r}"
            )
        anchors.append((
            _parse_float(section, "shadowing_anchors", parts[0]),
            _parse_float(section, "shadowing_anchors", parts[1]),
        ))
    if not anchors:
        raise ConfigError(f"[{section}] shadowing_anchors: empty anchor list")
    return tuple(anchors)


def load_config_file(path: str | Path) -> ParsedConfig:
    """Parse a config file into raw sections (no scenario assembly yet).

    Raises:
        ConfigError: On unknown sections/keys or malformed values.
        FileNotFoundError: If the file does not exist.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(path.read_text(), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    sections: dict[str, dict[str, str]] = {}
    for section in parser.sections():
        if section not in _ALLOWED_KEYS:
            raise ConfigError(
                f"{path}: unknown section [{section}] "
                f"(allowed: {', '.join(sorted(_ALLOWED_KEYS))})"
            )
        keys = dict(parser.items(section))
        unknown = set(keys) - _ALLOWED_KEYS[section]
        if unknown:
            raise ConfigError(
                f"{path}: unknown key(s) {sorted(unknown)} in [{section}] "
                f"(allowed: {sorted(_ALLOWED_KEYS[section])})"
            )
        sections[section] = keys

    def side(section: str) -> SideConfig:
        keys = sections.get(section, {})
        values: dict[str, float] = {}
        for key, raw in keys.items():
            values[key] = _parse_float(section, key, raw)
        return SideConfig(**values)

    body = sections.get("body", {})
    link = sections.get("link", {})
    channel = sections.get("channel", {})

    frequency = DEFAULT_FREQUENCY_HZ
    if "frequency_hz" in channel:
        frequency = _parse_float("channel", "frequency_hz", channel["frequency_hz"])
        if frequency <= 0:
            raise ConfigError(f"[channel] frequency_hz must be positive, got {frequency}")
    if frequency > EQS_MAX_FREQUENCY_HZ:
        warnings.warn(
            f"configured frequency {frequency:.6g} Hz exceeds the "
            f"electro-quasistatic band (< {EQS_MAX_FREQUENCY_HZ:.0e} Hz); the "
            "capacitive model is frequency-flat but radiation effects are "
            "not represented",
            EqsRegimeWarning,
            stacklevel=2,
        )

    scenario = ScenarioConfig(
        tx=side("tx"),
        rx=side("rx"),
        c_b_f=_parse_float("body", "c_b_f", body["c_b_f"]) if "c_b_f" in body else None,
        dielectric_thickness_m=(
            _parse_float("body", "dielectric_thickness_m", body["dielectric_thickness_m"])
            if "dielectric_thickness_m" in body else None
        ),
        dielectric_table=body.get("dielectric_table"),
        segment=body.get("segment"),
        shadowing_anchors=(
            _parse_anchors("body", body["shadowing_anchors"])
            if "shadowing_anchors" in body else None
        ),
        segment_length_m=(
            _parse_float("body", "segment_length_m", body["segment_length_m"])
            if "segment_length_m" in body else None
        ),
        coupling_f=_parse_float("link", "coupling_f", link["coupling_f"]) if "coupling_f" in link else None,
        k_f_per_m=_parse_float("link", "k_f_per_m", link["k_f_per_m"]) if "k_f_per_m" in link else None,
        separation_m=_parse_float("link", "separation_m", link["separation_m"]) if "separation_m" in link else None,
        decouple_m=(
            _parse_float("link", "decouple_m", link["decouple_m"])
            if "decouple_m" in link else DECOUPLING_DISTANCE_M
        ),
        frequency_hz=frequency,
        base_dir=path.parent,
    )

    sweep = None
    if "sweep" in sections:
        raw = sections["sweep"]
        for key in ("kind", "min", "max", "steps"):
            if key not in raw:
                raise ConfigError(f"[sweep] missing required key {key!r}")
        sweep = SweepSection(
            kind=raw["kind"].strip(),
            start=_parse_float("sweep", "min", raw["min"]),
            stop=_parse_float("sweep", "max", raw["max"]),
            steps=_parse_int("sweep", "steps", raw["steps"]),
        )

    resonance = None
    if "resonance" in sections:
        raw = sections["resonance"]
        if "inductance_h" not in raw:
            raise ConfigError("[resonance] missing required key 'inductance_h'")
        resonance = ResonanceSection(
            inductance_h=_parse_float("resonance", "inductance_h", raw["inductance_h"]),
            series_resistance_ohm=(
                _parse_float("resonance", "series_resistance_ohm", raw["series_resistance_ohm"])
                if "series_resistance_ohm" in raw else DEFAULT_SERIES_RESISTANCE_OHM
            ),
            capacitance_f=(
                _parse_float("resonance", "capacitance_f", raw["capacitance_f"])
                if "capacitance_f" in raw else None
            ),
            f_min_hz=(
                _parse_float("resonance", "f_min_hz", raw["f_min_hz"])
                if "f_min_hz" in raw else DEFAULT_GRID_MIN_HZ
            ),
            f_max_hz=(
                _parse_float("resonance", "f_max_hz", raw["f_max_hz"])
                if "f_max_hz" in raw else DEFAULT_GRID_MAX_HZ
            ),
            points=_parse_int("resonance", "points", raw["points"]) if "points" in raw else DEFAULT_GRID_POINTS,
        )

    return ParsedConfig(path=path, scenario=scenario, sweep=sweep, resonance=resonance)


def resolve_table_path(name: str, base_dir: Path | None) -> Path:
    """Locate a dielectric table: absolute, config-relative, then $HBC_TABLE_DIR."""
    candidate = Path(name)
    if candidate.is_absolute():
        if candidate.is_file():
            return candidate
        raise ConfigError(f"dielectric table not found: {candidate}")
    tried = []
    if base_dir is not None:
        local = base_dir / candidate
        if local.is_file():
            return local
        tried.append(str(local))
    env_dir = os.environ.get(TABLE_DIR_ENV)
    if env_dir:
        from_env = Path(env_dir) / candidate
        if from_env.is_file():
            return from_env
        tried.append(str(from_env))
    if candidate.is_file():
        return candidate
    tried.append(str(candidate))
    raise ConfigError(
        f"dielectric table {name!r} not found (tried: {', '.join(tried)}; "
        f"set {TABLE_DIR_ENV} to the table directory)"
    )


def load_dielectric_table(scenario: ScenarioConfig) -> DielectricTable:
    if scenario.dielectric_table is None:
        raise ConfigError("missing required parameter [body] dielectric_table")
    return DielectricTable.from_csv(
        resolve_table_path(scenario.dielectric_table, scenario.base_dir)
    )


def _check_consistency(name: str, direct: float, derived: float) -> None:
    scale = max(abs(direct), abs(derived))
    if scale > 0 and abs(direct - derived) > CONSISTENCY_REL_TOL * scale:
        raise ConfigError(
            f"{name}: direct value {direct:.12g} disagrees with its geometric "
            f"derivation {derived:.12g} (more than {CONSISTENCY_REL_TOL:g} relative)"
        )


def _device_geometry(side: SideConfig, name: str) -> DeviceGeometry | None:
    if side.radius_m is None:
        return None
    if side.plate_separation_m is None:
        raise ConfigError(
            f"missing required parameter [{name}] plate_separation_m "
            "(required alongside radius_m)"
        )
    try:
        return DeviceGeometry(side.radius_m, side.plate_separation_m, side.disc_height_m)
    except ValueError as exc:
        raise ConfigError(f"[{name}] {exc}") from exc


def _shadowing(side: SideConfig, name: str, profile: ShadowingProfile | None) -> float | None:
    """Resolve the shadowing fraction: direct value, profile lookup, or both
    (consistency-checked)."""
    from_profile = None
    if side.position_s is not None and profile is not None:
        try:
            from_profile = shadowing_factor(side.position_s, profile)
        except ValueError as exc:
            raise ConfigError(f"[{name}] position_s: {exc}") from exc
    if side.shadowing_x is not None:
        if not (0.0 < side.shadowing_x <= 1.0):
            raise ConfigError(
                f"[{name}] shadowing_x must be in (0, 1], got {side.shadowing_x}"
            )
        if from_profile is not None:
            _check_consistency(f"[{name}] shadowing_x", side.shadowing_x, from_profile)
            return from_profile
        return side.shadowing_x
    return from_profile


def _resolve_separation(config: ScenarioConfig) -> float | None:
    """Device separation: explicit, from body positions, or both (checked)."""
    derived = None
    tx_s, rx_s = config.tx.position_s, config.rx.position_s
    if tx_s is not None and rx_s is not None:
        if config.segment_length_m is None:
            raise ConfigError(
                "missing required parameter [body] segment_length_m "
                "(required to turn device positions into a separation)"
            )
        derived = abs(tx_s - rx_s) * config.segment_length_m
        if derived <= 0:
            raise ConfigError(
                f"tx and rx positions coincide (position_s = {tx_s:g}); "
                "device separation would be zero"
            )
    if config.separation_m is not None:
        if config.separation_m <= 0:
            raise ConfigError(
                f"[link] separation_m must be positive, got {config.separation_m}"
            )
        if derived is not None:
            _check_consistency("[link] separation_m", config.separation_m, derived)
            return derived
        return config.separation_m
    return derived


def effective_coupling_capacitance(
    geom: DeviceGeometry, d: float, k: CouplingConstant, decouple_m: float
) -> float:
    """Coupling capacitance with the far-field cutoff applied.

    The near-field law C_c = k*A/d only holds while the two ground plates see
    each other; beyond ``decouple_m`` the body and environment shield the
    direct path and the coupling drops below anything resolvable, so it is
    taken as zero.
    """
    if d >= decouple_m:
        return 0.0
    return coupling_capacitance(geom, d, k)


def build_scenario(config: ScenarioConfig) -> ChannelScenario:
    """Assemble a :class:`ChannelScenario` from raw config inputs.

    Every capacitance may come directly or from geometry; whichever route is
    used is recorded as provenance on the scenario.

    Raises:
        ConfigError: Naming the missing or inconsistent field.
    """
    profile = config.profile()
    tx_geom = _device_geometry(config.tx, "tx")
    rx_geom = _device_geometry(config.rx, "rx")
    x_tx = _shadowing(config.tx, "tx", profile)
    x_rx = _shadowing(config.rx, "rx", profile)

    def resolve_return_path(
        side: SideConfig, geom: DeviceGeometry | None, x: float | None, name: str
    ) -> float:
        derived = None
        if geom is not None and x is not None:
            derived = return_path_capacitance(geom, x)
        if side.return_path_f is not None:
            if derived is not None:
                _check_consistency(f"[{name}] return_path_f", side.return_path_f, derived)
                return derived
            return side.return_path_f
        if derived is None:
            raise ConfigError(
                f"missing required parameter: [{name}] return_path_f, or radius_m "
                "plus shadowing_x/position_s to derive it"
            )
        return derived

    c_x_tx = resolve_return_path(config.tx, tx_geom, x_tx, "tx")
    c_x_rx = resolve_return_path(config.rx, rx_geom, x_rx, "rx")

    # Ground-to-body capacitance of the receiver.
    derived_gb = None
    if rx_geom is not None and config.rx.fringe_f is not None:
        if config.rx.fringe_f < 0:
            raise ConfigError(f"[rx] fringe_f must be nonnegative, got {config.rx.fringe_f}")
        derived_gb = ground_to_body_capacitance(
            plate_to_plate_capacitance(rx_geom), config.rx.fringe_f
        )
    if config.rx.ground_body_f is not None:
        if derived_gb is not None:
            _check_consistency("[rx] ground_body_f", config.rx.ground_body_f, derived_gb)
            c_gb_rx = derived_gb
        else:
            c_gb_rx = config.rx.ground_body_f
    elif derived_gb is not None:
        c_gb_rx = derived_gb
    else:
        raise ConfigError(
            "missing required parameter: [rx] ground_body_f, or radius_m plus "
            "plate_separation_m and fringe_f to derive it"
        )

    if config.rx.load_f is None:
        raise ConfigError("missing required parameter: [rx] load_f")
    c_l = config.rx.load_f

    # Body capacitance: direct or via the dielectric-thickness table.
    derived_cb = None
    if config.dielectric_thickness_m is not None:
        table = load_dielectric_table(config)
        try:
            derived_cb = body_capacitance_lookup(config.dielectric_thickness_m, table)
        except ValueError as exc:
            raise ConfigError(f"[body] dielectric_thickness_m: {exc}") from exc
    if config.c_b_f is not None:
        if derived_cb is not None:
            _check_consistency("[body] c_b_f", config.c_b_f, derived_cb)
            c_b = derived_cb
        else:
            c_b = config.c_b_f
    elif derived_cb is not None:
        c_b = derived_cb
    else:
        raise ConfigError(
            "missing required parameter: [body] c_b_f, or dielectric_thickness_m "
            "plus dielectric_table to derive it"
        )

    # Inter-device coupling: direct, or the shielded near-field law.
    separation = _resolve_separation(config)
    k = CouplingConstant(config.k_f_per_m) if config.k_f_per_m is not None else None
    derived_cc = None
    if k is not None and separation is not None:
        if tx_geom is None:
            raise ConfigError(
                "missing required parameter: [tx] radius_m (needed for the "
                "coupling capacitance plate area)"
            )
        derived_cc = effective_coupling_capacitance(tx_geom, separation, k, config.decouple_m)
    if config.coupling_f is not None:
        if config.coupling_f < 0:
            raise ConfigError(f"[link] coupling_f must be nonnegative, got {config.coupling_f}")
        if derived_cc is not None:
            _check_consistency("[link] coupling_f", config.coupling_f, derived_cc)
            c_c = derived_cc
        else:
            c_c = config.coupling_f
    elif derived_cc is not None:
        c_c = derived_cc
    else:
        raise ConfigError(
            "missing required parameter: [link] coupling_f, or k_f_per_m plus a "
            "separation (separation_m or device positions) to derive it"
        )

    provenance = GeometricProvenance(
        tx_geom=tx_geom,
        rx_geom=rx_geom,
        x_tx=x_tx,
        x_rx=x_rx,
        c_f=config.rx.fringe_f,
        d=separation if derived_cc is not None else None,
        k=k if derived_cc is not None else None,
        decouple_m=config.decouple_m if derived_cc is not None else None,
    )
    if all(
        value is None
        for value in (tx_geom, rx_geom, x_tx, x_rx, config.rx.fringe_f, provenance.d)
    ):
        provenance = None

    try:
        scenario = ChannelScenario(
            c_x_tx=c_x_tx, c_x_rx=c_x_rx, c_gb_rx=c_gb_rx, c_l=c_l, c_b=c_b,
            c_c=c_c, provenance=provenance,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    scenario.validate_provenance()
    return scenario


def with_override(config: ScenarioConfig, **changes) -> ScenarioConfig:
    """Functional update helper for sweep stepping."""
    return dataclasses.replace(config, **changes)


def with_side_override(config: ScenarioConfig, side: str, **changes) -> ScenarioConfig:
    current = getattr(config, side)
    return dataclasses.replace(config, **{side: dataclasses.replace(current, **changes)})
