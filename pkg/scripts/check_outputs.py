# scripts/check_outputs.py
"""
Prueft erzeugte Ausgaben: JSON gegen docs/schemas/<command>.schema.json,
CSV auf Header-Zeile und erwartete Spalten.

    python scripts/check_outputs.py data/processed
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import jsonschema
import pandas as pd
from colorama import Fore, Style, init

from regime_analyzer import POINT_COLUMNS
from util import REPO_ROOT

SCHEMA_DIR = REPO_ROOT / "docs" / "schemas"

# Pflichtspalten je Subcommand (excess/delta/plan: flache Einzelzeile, Teilmenge)
CSV_COLUMNS: Dict[str, List[str]] = {
    "rho": ["x", "rho_hat"],
    "switching": ["x", "chi", "chi_tilde", "chi_tilde_sq"],
    "response": ["a", "mass", "value", "abs_error", "evaluations", "converged", "note"],
    "excess": ["switching", "spectral", "a", "lambda", "excess", "converged"],
    "delta": ["switching", "spectral", "a", "lambda", "f0", "excess", "delta", "converged"],
    "sweep": POINT_COLUMNS,
    "table1": POINT_COLUMNS,
    "fig1": POINT_COLUMNS,
    "plan": ["species", "min_delta", "l_n_bound", "confound.clean"],
}
EXACT_HEADER = {"rho", "switching", "response", "sweep", "table1", "fig1"}


def load_schema(command: str) -> Dict[str, Any]:
    path = SCHEMA_DIR / f"{command}.schema.json"
    if not path.exists():
        raise FileNotFoundError(f"no schema for {command!r}: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def validate_json(doc: Any, command: str) -> List[str]:
    """Liste der Schema-Verletzungen (leer = ok)."""
    schema = load_schema(command)
    validator = jsonschema.validators.validator_for(schema)(schema)
    return [f"{'/'.join(str(p) for p in e.absolute_path) or '<root>'}: {e.message}"
            for e in sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))]


def check_csv_text(text: str, command: str) -> List[str]:
    if not text.strip():
        return ["empty CSV"]
    header = text.splitlines()[0].split(",")
    expected = CSV_COLUMNS[command]
    problems = []
    if command in EXACT_HEADER:
        if header != expected:
            problems.append(f"header {header} != {expected}")
    else:
        missing = [c for c in expected if c not in header]
        if missing:
            problems.append(f"missing columns {missing}")
    try:
        pd.read_csv(io.StringIO(text))
    except Exception as e:
        problems.append(f"unreadable: {e}")
    return problems


def command_of(path: Path) -> Optional[str]:
    """table1_all_exponential.json -> table1"""
    stem = path.stem.split("_")[0]
    return stem if stem in CSV_COLUMNS else None


def check_file(path: Path) -> Tuple[bool, List[str]]:
    command = command_of(path)
    if command is None:
        return False, [f"cannot infer subcommand from {path.name}"]
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        try:
            problems = validate_json(json.loads(text), command)
        except json.JSONDecodeError as e:
            problems = [f"invalid JSON: {e}"]
    else:
        problems = check_csv_text(text, command)
    return not problems, problems


def run_check(directory: Path) -> bool:
    init(autoreset=True)
    files = sorted(p for p in directory.glob("*") if p.suffix in (".csv", ".json"))
    print("=" * 60)
    print(f"OUTPUT CHECK - {directory}")
    print("=" * 60)
    if not files:
        print(f"{Fore.YELLOW}[LEER] keine CSV/JSON-Dateien gefunden{Style.RESET_ALL}")
        return False
    all_ok = True
    for p in files:
        ok, problems = check_file(p)
        all_ok &= ok
        if ok:
            print(f"{Fore.GREEN}[OK] {p.name}{Style.RESET_ALL}")
        else:
            print(f"{Fore.RED}[ERR] {p.name:<40} | {problems[0]}{Style.RESET_ALL}")
            for extra in problems[1:5]:
                print(f"{Fore.RED}      {extra}{Style.RESET_ALL}")
    print("=" * 60)
    return all_ok


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("directory", nargs="?", default=str(REPO_ROOT / "data" / "processed"))
    args = ap.parse_args(argv)
    return 0 if run_check(Path(args.directory)) else 1


if __name__ == "__main__":
    sys.exit(main())
