#!/usr/bin/env python3
"""
Custom argcomplete completers for the submodmm CLI.
"""

import json
from pathlib import Path
from typing import Any, List

try:
    from argcomplete.completers import FilesCompleter
except ImportError:
    # Fallback if argcomplete is not installed
    FilesCompleter = None

from .mmax import SCHEDULE_NAMES
from .semigradient import SUPERGRADIENT_KINDS

if FilesCompleter:
    JSONFilesCompleter = FilesCompleter(allowednames=(".json",), directories=True)
else:
    JSONFilesCompleter = None


def schedule_completer(prefix: str = "", **kwargs) -> List[str]:
    """Complete MMax schedule names."""
    return [s for s in SCHEDULE_NAMES if s.startswith(prefix.lower())]


def supergradient_kind_completer(prefix: str = "", **kwargs) -> List[str]:
    return [k for k in SUPERGRADIENT_KINDS if k.startswith(prefix)]


def anchor_completer(prefix: str = "", parsed_args: Any = None, **kwargs) -> List[str]:
    """Suggest element ids 1..n from the problem file given with --spec."""
    spec = getattr(parsed_args, "spec", None) if parsed_args else None
    if not spec:
        return []
    path = Path(spec)
    if not path.is_file():
        return []
    try:
        with open(path) as f:
            n = int(json.load(f).get("n", 0))
    except Exception:
        return []
    head, _, last = prefix.rpartition(",")
    head = f"{head}," if head else ""
    return [f"{head}{j}" for j in range(1, n + 1) if str(j).startswith(last)]

