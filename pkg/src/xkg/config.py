"""Pipeline configuration: backend descriptor and resource paths.

Configs load from JSON; relative resource paths resolve against the config
file's directory. ``default_config`` points at the resources bundled with
the package, so the tool works out of the box in mock mode. Credentials are
never stored in the config, only the name of the environment variable that
holds them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Optional, Union

from .backends import BackendConfig


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ResourcePaths:
    rolesets: Path
    alignments: Path
    links: Path
    mini_ontology: Path
    prompts_dir: Path
    mock_dir: Path

    def validate(self) -> None:
        for name in ("rolesets", "alignments", "links", "mini_ontology"):
            path: Path = getattr(self, name)
            if not path.is_file():
                raise ConfigError(f"resource file for {name!r} not found: {path}")
        for name in ("prompts_dir", "mock_dir"):
            path = getattr(self, name)
            if not path.is_dir():
                raise ConfigError(f"resource directory for {name!r} not found: {path}")


@dataclass(frozen=True)
class PipelineConfig:
    backend: BackendConfig = field(default_factory=BackendConfig)
    resources: Optional[ResourcePaths] = None
    force_merge: bool = False

    def require_resources(self) -> ResourcePaths:
        if self.resources is None:
            raise ConfigError("no resource paths configured")
        return self.resources


def bundled_resources_root() -> Path:
    return Path(str(importlib_resources.files("xkg").joinpath("resources")))


def default_resource_paths() -> ResourcePaths:
    root = bundled_resources_root()
    return ResourcePaths(
        rolesets=root / "maps" / "rolesets.json",
        alignments=root / "maps" / "alignments.json",
        links=root / "maps" / "links.json",
        mini_ontology=root / "ontology" / "mini-ontology.ttl",
        prompts_dir=root / "prompts",
        mock_dir=root / "mocks",
    )


def default_config() -> PipelineConfig:
    paths = default_resource_paths()
    paths.validate()
    return PipelineConfig(resources=paths)


def load_config(path: Union[str, Path]) -> PipelineConfig:
    """Load a JSON config; unspecified resource paths fall back to bundled."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")

    backend_raw = raw.get("backend", {})
    known = {f for f in BackendConfig.__dataclass_fields__}
    unknown = set(backend_raw) - known
    if unknown:
        raise ConfigError(f"unknown backend settings: {sorted(unknown)}")
    backend = BackendConfig(**backend_raw)

    base_dir = path.parent
    defaults = default_resource_paths()
    resources_raw = raw.get("resources", {})

    def resolve(name: str, default: Path) -> Path:
        value = resources_raw.get(name)
        if value is None:
            return default
        candidate = Path(value)
        return candidate if candidate.is_absolute() else (base_dir / candidate).resolve()

    paths = ResourcePaths(
        rolesets=resolve("rolesets", defaults.rolesets),
        alignments=resolve("alignments", defaults.alignments),
        links=resolve("links", defaults.links),
        mini_ontology=resolve("mini_ontology", defaults.mini_ontology),
        prompts_dir=resolve("prompts_dir", defaults.prompts_dir),
        mock_dir=resolve("mock_dir", defaults.mock_dir),
    )
    paths.validate()
    return PipelineConfig(backend=backend, resources=paths,
                          force_merge=bool(raw.get("force_merge", False)))


def with_force_merge(config: PipelineConfig, force_merge: bool) -> PipelineConfig:
    return replace(config, force_merge=force_merge)
