#!/usr/bin/env python3
"""
Generate the scenario file reference from the pydantic models and the builtin catalog.
This script walks the ScenarioSpec JSON schema and writes docs/SCENARIO_SCHEMA.md.
"""

import sys
from pathlib import Path
from typing import Any, Dict, List

# Add src directory to path to import slitwave
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from jinja2 import Environment
from slitwave.registry import ScenarioRegistry
from slitwave.scenarios import ScenarioSpec


DOC_TEMPLATE = """# Scenario file reference

Generated by `scripts/generate_scenario_docs.py` from the `ScenarioSpec` model; do not edit by hand.

A scenario file is one JSON object. Dimensional fields are plain numbers in
the unit listed here; on the command line they are overridden with a suffixed
quantity (`--set config.tau=96fs`), which is converted to this unit.

{% for model in models %}
## {{ model.name }}

{% if model.description %}
{{ model.description }}

{% endif %}
| Field | Type | Unit | Required | Default |
|-------|------|------|----------|---------|
{% for f in model.fields %}
| `{{ f.name }}` | {{ f.type }} | {{ f.unit }} | {{ "yes" if f.required else "no" }} | {{ f.default }} |
{% endfor %}

{% endfor %}
## Builtin catalog

| Name | Kind | Observable | Numeric oracle |
|------|------|------------|----------------|
{% for item in catalog %}
| `{{ item.name }}` | {{ item.kind }} | {{ item.observable }} | {{ "yes" if item.numeric else "no" }} |
{% endfor %}
"""


def describe_type(prop: Dict[str, Any]) -> str:
    """Readable type of one schema property."""
    if "$ref" in prop:
        return prop["$ref"].split("/")[-1]
    if "enum" in prop:
        return " \\| ".join(f"`{v}`" for v in prop["enum"])
    if "const" in prop:
        return f"`{prop['const']}`"
    for key in ("anyOf", "oneOf"):
        if key in prop:
            return " \\| ".join(describe_type(p) for p in prop[key] if p.get("type") != "null")
    return prop.get("type", "any")


def collect_models(schema: Dict[str, Any]) -> List[Dict[str, Any]]:
    """One entry per model in the schema, the top-level spec first."""
    definitions = schema.get("$defs", {})
    ordered = [("ScenarioSpec", schema)] + sorted(definitions.items())
    models = []
    for name, model in ordered:
        if "properties" not in model:
            continue
        required = set(model.get("required", []))
        fields = []
        for field_name, prop in model["properties"].items():
            default = prop.get("default", "")
            fields.append({
                "name": field_name,
                "type": describe_type(prop),
                "unit": prop.get("unit", ""),
                "required": field_name in required,
                "default": f"`{default}`" if default != "" else "",
            })
        models.append({"name": name, "description": model.get("description", ""), "fields": fields})
    return models


def generate_scenario_docs() -> None:
    """Render docs/SCENARIO_SCHEMA.md."""
    registry = ScenarioRegistry()
    catalog = [registry.get_scenario_metadata(name) for name in registry.list_scenarios()]
    models = collect_models(ScenarioSpec.model_json_schema())

    env = Environment(trim_blocks=True, lstrip_blocks=True, keep_trailing_newline=True)
    text = env.from_string(DOC_TEMPLATE).render(models=models, catalog=catalog)

    output_path = Path(__file__).parent.parent / "docs" / "SCENARIO_SCHEMA.md"
    output_path.write_text(text, encoding="utf-8")
    print(f"Scenario reference generated: {output_path}")
    print(f"Documented {len(models)} models and {len(catalog)} builtin scenarios")


if __name__ == "__main__":
    generate_scenario_docs()
