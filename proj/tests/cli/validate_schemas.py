"""Validates golden CLI outputs and shipped inputs against the published schemas."""

import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource


def main(schema_dir: pathlib.Path, golden_dir: pathlib.Path, data_dir: pathlib.Path) -> int:
    registry = Registry()
    schemas = {}
    for path in schema_dir.glob("*.schema.json"):
        contents = json.loads(path.read_text())
        schemas[path.name.removesuffix(".schema.json")] = contents
        registry = registry.with_resource(path.name, Resource.from_contents(contents))

    def check(kind: str, path: pathlib.Path) -> None:
        validator = jsonschema.Draft202012Validator(schemas[kind], registry=registry)
        validator.validate(json.loads(path.read_text()))
        print(f"ok {kind}: {path.name}")

    checked = 0
    for path in sorted(golden_dir.glob("*.json")):
        check(path.name.split("_", 1)[0], path)
        checked += 1
    for path in sorted((data_dir / "configs").glob("*.json")):
        check("sim-config", path)
        checked += 1
    for path in sorted((data_dir / "profiles").glob("*.json")):
        check("profile", path)
        checked += 1
    return 0 if checked else 1


if __name__ == "__main__":
    sys.exit(main(*map(pathlib.Path, sys.argv[1:4])))
