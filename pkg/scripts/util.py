# scripts/util.py
from __future__ import annotations

from dataclasses import fields, is_dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import json, math, os, sys
import numpy as np
import pandas as pd
import yaml

REPO_ROOT = Path(__file__).resolve().parents[1]
DEFAULT_CONFIG = REPO_ROOT / "config" / "config.yaml"

# 17 signifikante Stellen -> verlustfreier Round-Trip fuer float64
CSV_FLOAT_FORMAT = "%.16e"

# =========================================================
# Zeit & Pfad
# =========================================================

def now_utc_iso() -> str:
    return datetime.now(timezone.utc).isoformat()

def ensure_dir(p: str | os.PathLike) -> None:
    """Stellt sicher, dass ein Verzeichnis existiert."""
    Path(p).mkdir(parents=True, exist_ok=True)

def ensure_parent(path: str | os.PathLike) -> None:
    """Erzeugt das Elternverzeichnis einer Datei."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)

# =========================================================
# Logging (leichtgewichtig, nach stderr damit stdout maschinenlesbar bleibt)
# =========================================================

_LEVELS = {"INFO": 10, "WARN": 20, "ERROR": 30}

def _log_threshold() -> int:
    return _LEVELS.get(env_get("UDW_LOG_LEVEL", "INFO").strip().upper(), 10)

def set_log_level(level: str) -> None:
    os.environ["UDW_LOG_LEVEL"] = level.upper()

def _log(tag: str, level: int, *msg):
    if level < _log_threshold():
        return
    print(f"[{tag} {now_utc_iso()}]", *msg, file=sys.stderr, flush=True)

def log_info(*msg):  _log("INFO", 10, *msg)
def log_warn(*msg):  _log("WARN", 20, *msg)
def log_error(*msg): _log("ERR ", 30, *msg)

# =========================================================
# Config / ENV / JSON
# =========================================================

def read_yaml(path: str | os.PathLike):
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)

def env_get(key: str, default: Optional[str] = None) -> str:
    v = os.getenv(key, "")
    return v if v != "" else (default if default is not None else "")

def env_int(key: str, default: int = 0) -> int:
    try: return int(os.getenv(key, "").strip())
    except Exception: return default

def load_config(path: str | os.PathLike | None = None) -> Dict[str, Any]:
    """
    Laedt config/config.yaml. Reihenfolge: expliziter Pfad > $UDW_CONFIG > Default.
    Fehlende Datei -> leeres dict (Code-Defaults greifen).
    """
    p = Path(path) if path else Path(env_get("UDW_CONFIG", str(DEFAULT_CONFIG)))
    if not p.exists():
        log_warn(f"config not found: {p} (using built-in defaults)")
        return {}
    return read_yaml(p) or {}

def cfg_get(cfg: Dict[str, Any] | None, dotted: str, default=None):
    """cfg_get(cfg, 'quadrature.rel_tol', 1e-8)"""
    node: Any = cfg or {}
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            return default
        node = node[part]
    return default if node is None else node

def to_jsonable(obj: Any) -> Any:
    """Dataclasses/Enums/numpy -> JSON-taugliche Python-Objekte; NaN/inf -> None."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj

def dumps_json(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), ensure_ascii=False, indent=2, allow_nan=False) + "\n"

def write_json(path: str | os.PathLike, obj) -> None:
    ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_json(obj))

# =========================================================
# CSV
# =========================================================

def frame_to_csv(df: pd.DataFrame) -> str:
    """CSV-Text mit Header und 17 signifikanten Stellen."""
    return df.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")

def emit_text(text: str, out: str | os.PathLike | None) -> None:
    """out=None oder '-' -> stdout, sonst Datei."""
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    ensure_parent(out)
    with open(out, "w", encoding="utf-8", newline="") as f:
        f.write(text)

# =========================================================
# Reports / Kleinkram
# =========================================================

def save_report(path: str | os.PathLike, status: Dict[str, Any]) -> None:
    """Kleiner Helfer für JSON-Reports (mit Zeitstempel)."""
    status = dict(status)
    status["ts"] = now_utc_iso()
    write_json(path, status)

def fmt_sig(x: float, digits: int = 1) -> str:
    """Formatiert auf `digits` signifikante Stellen, z.B. 3e-19."""
    if x == 0 or not math.isfinite(x):
        return repr(float(x))
    return f"{x:.{max(digits - 1, 0)}e}".replace("e-0", "e-").replace("e+0", "e+")
