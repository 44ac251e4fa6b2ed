# Copyright 2026 The qswr Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Checks the sample configs against the published schema and that broken ones are rejected."""

import json
import pathlib
import sys

import jsonschema


def main() -> int:
    root = pathlib.Path(sys.argv[1])
    schema = json.loads((root / "schema" / "experiment.schema.json").read_text())
    validator = jsonschema.Draft202012Validator(schema)
    jsonschema.Draft202012Validator.check_schema(schema)
    failures = 0
    for path in sorted((root / "configs").glob("*.json")):
        errors = list(validator.iter_errors(json.loads(path.read_text())))
        status = "ok" if not errors else "INVALID: " + errors[0].message
        print(f"{path.name}: {status}")
        failures += bool(errors)
    for path in sorted((root / "tests" / "data").glob("*.json")):
        errors = list(validator.iter_errors(json.loads(path.read_text())))
        print(f"{path.name}: {'rejected' if errors else 'UNEXPECTEDLY VALID'}")
        failures += not errors
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
