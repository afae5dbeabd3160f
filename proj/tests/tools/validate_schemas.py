"""Validates API samples written by the C++ tests against the shipped schemas.

Samples are named <schema-stem>__<anything>.json, e.g.
accuracy_report__e2e.json is checked against accuracy_report.schema.json.
"""

import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource


def main(schema_dir: str, sample_dir: str) -> int:
    schemas = {}
    for path in sorted(pathlib.Path(schema_dir).glob("*.schema.json")):
        schema = json.loads(path.read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        schemas[path.name] = schema
    registry = Registry().with_resources(
        (name, Resource.from_contents(schema)) for name, schema in schemas.items()
    )

    samples = sorted(pathlib.Path(sample_dir).glob("*.json"))
    if not samples:
        print(f"no samples in {sample_dir}")
        return 1
    failures = 0
    seen = set()
    for sample in samples:
        stem = sample.name.split("__")[0]
        schema = schemas.get(f"{stem}.schema.json")
        if schema is None:
            print(f"FAIL {sample.name}: no schema {stem}.schema.json")
            failures += 1
            continue
        seen.add(stem)
        validator = jsonschema.Draft202012Validator(schema, registry=registry)
        errors = sorted(validator.iter_errors(json.loads(sample.read_text())), key=str)
        if errors:
            failures += 1
            print(f"FAIL {sample.name}: {errors[0].message} at {list(errors[0].absolute_path)}")
        else:
            print(f"ok   {sample.name}")
    missing = {name.removesuffix(".schema.json") for name in schemas} - seen
    if missing:
        print(f"FAIL schemas without samples: {sorted(missing)}")
        failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
