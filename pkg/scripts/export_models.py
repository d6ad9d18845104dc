#!/usr/bin/env python3
"""Regenerate models/<id>.json from the bundled reference equations.

Run from the repo root after any change to the stored coefficients:

    python3 scripts/export_models.py
"""

from pathlib import Path

from meltmap import model_zoo
from meltmap.polyfit import equation_to_json
import json

OUT_DIR = Path(__file__).parent.parent / "models"


def main():
    OUT_DIR.mkdir(exist_ok=True)
    for entry in model_zoo.list_models():
        path = OUT_DIR / f"{entry.id}.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(equation_to_json(entry.equation), fh, indent=2)
            fh.write("\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
