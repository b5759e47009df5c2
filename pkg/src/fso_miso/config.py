"""INI configuration files -> scenario/sweep/optimizer settings.

The schema is strict: an unrecognized section or key is a hard error with
a line-anchored message, so typos never silently fall back to defaults.
Blank values mean "use the default" for optional keys.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from .channel import PhaseModel
from .detection import Combiner, PpmConfig
from .errors import ConfigError, FsoMisoError
from .optimizer import GaConfig
from .simulation import Scenario, ScenarioConfig
from .sweeps import SweepSpec


def _parse_float(s: str) -> float:
    return float(s)


def _parse_int(s: str) -> int:
    return int(s)


def _parse_float_list(s: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in s.replace(",", " ").split())


def _parse_str_list(s: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in s.split(",") if tok.strip())


def _parse_str(s: str) -> str:
    return s.strip()


_SCHEMA: dict[str, dict[str, object]] = {
    "array": {
        "side": _parse_float,
        "rows": _parse_int,
        "cols": _parse_int,
        "rho": _parse_float,
        "lambda_p": _parse_float,
        "offsets_u": _parse_float_list,
        "offsets_v": _parse_float_list,
    },
    "channel": {
        "n_beams": _parse_int,
        "fading_mean": _parse_float,
        "gamma": _parse_float,
        "snr_db": _parse_float,
        "phase_error": _parse_str,
        "sigma_phi": _parse_float,
        "sigma_h_sq": _parse_float,
    },
    "pointing": {
        "sigma_x": _parse_float,
        "rho_c": _parse_float,
    },
    "ppm": {
        "order": _parse_int,
    },
    "sweep": {
        "variable": _parse_str,
        "values": _parse_float_list,
        "scenarios": _parse_str_list,
        "combiners": _parse_str_list,
        "trials": _parse_int,
        "seed": _parse_int,
    },
    "ga": {
        "rho_min": _parse_float,
        "rho_max": _parse_float,
        "population": _parse_int,
        "generations": _parse_int,
        "crossover_rate": _parse_float,
        "mutation_rate": _parse_float,
        "mutation_scale": _parse_float,
        "tournament": _parse_int,
        "elitism": _parse_int,
        "seed": _parse_int,
        "trials": _parse_int,
    },
}

_REQUIRED: dict[str, tuple[str, ...]] = {
    "array": ("side", "rows", "cols", "rho"),
    "channel": ("n_beams", "snr_db"),
    "sweep": ("variable", "values", "scenarios", "combiners", "trials", "seed"),
    "ga": ("rho_min", "rho_max"),
}


def _line_of(lines: list[str], section: str, key: str | None) -> int:
    """1-based line number of a section header or of a key inside it."""
    in_section = False
    for i, raw in enumerate(lines, start=1):
        text = raw.strip()
        if text.startswith("[") and text.endswith("]"):
            name = text[1:-1].strip()
            if key is None and name == section:
                return i
            in_section = name == section
        elif key is not None and in_section:
            head = text.split("=", 1)[0].split(":", 1)[0].strip()
            if head == key:
                return i
    return 0


@dataclass(frozen=True)
class FileConfig:
    """Everything a CLI command may need from one config file."""

    base: ScenarioConfig
    sweep: SweepSpec
    ga: GaConfig | None
    ga_trials: int | None


def _typed_sections(path: str) -> dict[str, dict[str, object]]:
    with open(path, "r") as f:
        text = f.read()
    lines = text.splitlines()
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    out: dict[str, dict[str, object]] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(
                f"{path}:{_line_of(lines, section, None)}: unknown section [{section}]"
            )
        schema = _SCHEMA[section]
        out[section] = {}
        for key, raw in parser[section].items():
            if key not in schema:
                raise ConfigError(
                    f"{path}:{_line_of(lines, section, key)}: "
                    f"unknown key {key!r} in [{section}]"
                )
            raw = raw.strip()
            if raw == "":
                continue  # blank -> default
            try:
                out[section][key] = schema[key](raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(
                    f"{path}:{_line_of(lines, section, key)}: "
                    f"bad value for {key!r} in [{section}]: {exc}"
                ) from exc
    for section, keys in _REQUIRED.items():
        if section == "ga" and section not in out:
            continue  # [ga] only needed by the optimize command
        if section not in out:
            raise ConfigError(f"{path}: missing required section [{section}]")
        for key in keys:
            if key not in out[section]:
                raise ConfigError(
                    f"{path}: missing required key {key!r} in [{section}]"
                )
    return out


def load_config(path: str) -> FileConfig:
    """Parse and validate a config file into runnable specs."""
    sections = _typed_sections(path)
    arr = sections.get("array", {})
    ch = sections.get("channel", {})
    pt = sections.get("pointing", {})
    ppm = sections.get("ppm", {})
    sw = sections.get("sweep", {})

    phase_kind = ch.get("phase_error", "none")
    try:
        phase = PhaseModel(phase_kind, ch.get("sigma_phi", 0.0))
        scenarios = tuple(Scenario(s) for s in sw["scenarios"])
        combiners = tuple(Combiner(c.upper()) for c in sw["combiners"])

        base = ScenarioConfig(
            scenario=scenarios[0],
            combiner=combiners[0],
            n_beams=ch["n_beams"],
            side=arr["side"],
            rows=arr["rows"],
            cols=arr["cols"],
            radius=arr["rho"],
            snr_db=ch["snr_db"],
            trials=sw["trials"],
            seed=sw["seed"],
            peak_intensity=arr.get("lambda_p", 1.0),
            gamma=ch.get("gamma", 1.0),
            fading_mean=ch.get("fading_mean", 0.5),
            phase_model=phase,
            sigma_x=pt.get("sigma_x", 0.0),
            rho_c=pt.get("rho_c"),
            sigma_h_sq=ch.get("sigma_h_sq"),
            ppm=PpmConfig(ppm.get("order", 8)),
            offsets_u=arr.get("offsets_u"),
            offsets_v=arr.get("offsets_v"),
        )
        sweep = SweepSpec(
            base=base,
            variable=sw["variable"],
            values=tuple(sw["values"]),
            scenarios=scenarios,
            combiners=combiners,
        )
        ga = None
        ga_trials = None
        if "ga" in sections:
            g = sections["ga"]
            ga_trials = g.get("trials")
            ga = GaConfig(
                rho_min=g["rho_min"],
                rho_max=g["rho_max"],
                population=g.get("population", 40),
                generations=g.get("generations", 60),
                crossover_rate=g.get("crossover_rate", 0.9),
                mutation_rate=g.get("mutation_rate", 0.1),
                mutation_scale=g.get("mutation_scale", 0.05),
                tournament_size=g.get("tournament", 3),
                elitism=g.get("elitism", 2),
                seed=g.get("seed", 0),
            )
    except ConfigError:
        raise
    except (FsoMisoError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return FileConfig(base=base, sweep=sweep, ga=ga, ga_trials=ga_trials)
