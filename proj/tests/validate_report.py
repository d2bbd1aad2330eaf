"""Validates a report.json against tests/data/report.schema.json."""

import json
import os
import sys

import jsonschema

schema_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "report.schema.json")
with open(schema_path) as f:
    schema = json.load(f)
with open(sys.argv[1]) as f:
    report = json.load(f)
jsonschema.validate(report, schema)
print(f"{sys.argv[1]}: valid ({report['trials']} trials)")
