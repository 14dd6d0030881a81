"""
Scenario registry for the builtin catalog and user-supplied definition files.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from pydantic import ValidationError

from .errors import ScenarioCollisionError, ScenarioError, UnknownScenarioError
from .scenarios import ScenarioSpec
from .series import OutputRecord

logger = logging.getLogger(__name__)

BUILTIN_DEFINITIONS = Path(__file__).parent / "definitions"


class ScenarioRegistry:
    """Registry for managing scenario definitions."""

    def __init__(self, extra_dirs: Iterable[Path] = (), strict_mode: bool = True) -> None:
        """
        Initialize the registry and auto-discover definitions.

        Args:
            extra_dirs: Additional directories of ``*.json`` scenario files
            strict_mode: Whether invalid definition files raise instead of being skipped
        """
        self.strict_mode = strict_mode
        self._scenarios: Dict[str, ScenarioSpec] = {}
        self._sources: Dict[str, Path] = {}
        self._register_directory(BUILTIN_DEFINITIONS)
        for directory in extra_dirs:
            self._register_directory(Path(directory))

    def register_scenario(self, spec: ScenarioSpec, source: Optional[Path] = None) -> None:
        """Register a scenario.

        Raises:
            ScenarioCollisionError: If the name is already registered
        """
        if spec.name in self._scenarios:
            raise ScenarioCollisionError(
                f"Scenario definition collision detected for '{spec.name}':\n"
                f"  - Already defined in: {self._sources.get(spec.name, '<registered in code>')}\n"
                f"  - Conflicts with: {source or '<registered in code>'}\n"
                f"\n"
                f"A scenario name must be unique across the builtin catalog and every --catalog directory."
            )
        self._scenarios[spec.name] = spec
        if source is not None:
            self._sources[spec.name] = source

    def has_scenario(self, name: str) -> bool:
        """Check if a scenario is registered."""
        return name in self._scenarios

    def get_scenario(self, name: str) -> ScenarioSpec:
        """Get a scenario by name.

        Raises:
            UnknownScenarioError: If the name is not in the catalog
        """
        if name not in self._scenarios:
            raise UnknownScenarioError(
                f"Unknown scenario '{name}'. Available scenarios: {', '.join(self.list_scenarios())}"
            )
        return self._scenarios[name]

    def list_scenarios(self) -> List[str]:
        """List all registered scenario names, sorted."""
        return sorted(self._scenarios)

    def get_scenario_metadata(self, name: str) -> Optional[Dict[str, Any]]:
        """Get scenario metadata as a dictionary, or None if unknown."""
        spec = self._scenarios.get(name)
        if spec is None:
            return None
        return {
            "name": spec.name,
            "description": spec.description,
            "kind": spec.kind.value,
            "observable": spec.observation.observable.value,
            "numeric": spec.numeric is not None,
            "source": str(self._sources.get(name, "")),
        }

    def _register_directory(self, directory: Path) -> None:
        """Auto-discover and register scenarios from ``directory/*.json``."""
        if not directory.exists():
            if directory != BUILTIN_DEFINITIONS:
                raise ScenarioError(f"Scenario directory not found: {directory}")
            return

        for definition_file in sorted(directory.glob("*.json")):
            try:
                with open(definition_file, "r", encoding="utf-8") as f:
                    data = json.load(f)
                spec = ScenarioSpec.model_validate(data)
            except (json.JSONDecodeError, ValidationError) as e:
                error_msg = f"Invalid scenario definition {definition_file}: {e}"
                if self.strict_mode:
                    raise ScenarioError(error_msg) from e
                logger.warning(error_msg)
                continue

            self.register_scenario(spec, definition_file)
            logger.debug(f"Registered scenario '{spec.name}' from {definition_file}")


def load_spec_file(path: Path) -> ScenarioSpec:
    """Load one scenario from a file.

    Accepts a bare scenario spec (JSON) or any output written by the
    ``scenario`` command: a JSON output keeps the spec in ``meta.scenario``,
    a CSV output in its ``# scenario:`` provenance line.

    Raises:
        ScenarioError: If the file is unreadable or invalid
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"Cannot read scenario file {path}: {e}") from e

    try:
        if text.lstrip().startswith("#"):
            data = OutputRecord.read_csv(text).provenance.get("scenario")
        else:
            data = json.loads(text)
    except (json.JSONDecodeError, ValueError) as e:
        raise ScenarioError(f"Cannot parse scenario file {path}: {e}") from e
    if isinstance(data, dict) and isinstance(data.get("meta"), dict) and "scenario" in data["meta"]:
        data = data["meta"]["scenario"]
    if data is None:
        raise ScenarioError(f"Scenario file {path} has no embedded scenario")
    try:
        return ScenarioSpec.model_validate(data)
    except ValidationError as e:
        raise ScenarioError(f"Invalid scenario definition {path}: {e}") from e
