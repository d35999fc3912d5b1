"""
On-disk store of grid-tuning results.

An entry is keyed by a content digest of the system (W, T, b) and of every
setting that changes an iteration count: method, grid, tolerance, iteration
cap and the inner solver. Each entry repeats that signature; an entry whose
signature differs from the request is treated as absent.
"""

import hashlib
import json
from datetime import datetime, timedelta
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, Optional, Sequence

from slugify import slugify

from . import config
from .constants import DEFAULT_CACHE_AGE_HOURS
from .exceptions import CacheError
from .inner_solver import InnerSolveChoice, fingerprint

if TYPE_CHECKING:
    from .problems import Problem
    from .solvers import MethodKind, SolverConfig

ENTRY_SUFFIX = ".tune.json"


def _ordering_name(choice: InnerSolveChoice) -> str:
    if isinstance(choice.ordering, str):
        return choice.ordering
    hook = choice.ordering
    return f"{getattr(hook, '__module__', '')}.{getattr(hook, '__qualname__', type(hook).__name__)}"


def tuning_signature(problem: "Problem", method: "MethodKind", base: "SolverConfig",
                     grid: Sequence[float]) -> Dict[str, Any]:
    """Everything a cached grid search depends on, as plain JSON values."""
    w_order, w_digest = fingerprint(problem.W)
    t_order, t_digest = fingerprint(problem.T)
    rhs = hashlib.sha1()
    rhs.update(problem.b.re.tobytes())
    rhs.update(problem.b.im.tobytes())
    lo, hi, step = grid
    return {
        "W": f"{w_order}:{w_digest}",
        "T": f"{t_order}:{t_digest}",
        "b": rhs.hexdigest(),
        "method": method.value,
        "grid": [float(lo), float(hi), float(step)],
        "tolerance": base.tolerance,
        "max_iterations": base.max_iterations,
        "inner": base.inner.kind.value,
        "cg_tolerance": base.inner.cg_tolerance,
        "cg_max_iterations": base.inner.cg_max_iterations,
        "ordering": _ordering_name(base.inner),
    }


def tuning_key(label: str, signature: Dict[str, Any]) -> str:
    """File name of one entry: readable prefix, then a digest of the signature."""
    digest = hashlib.sha1(json.dumps(signature, sort_keys=True).encode("utf-8")).hexdigest()[:20]
    prefix = slugify(f"{label} {signature['method']}", separator="_")
    return f"{prefix}_{digest}{ENTRY_SUFFIX}"


def _enabled(use_cache: Optional[bool]) -> bool:
    return config.USE_CACHE if use_cache is None else use_cache


def load_tuning(key: str, signature: Dict[str, Any], max_age_hours: float = DEFAULT_CACHE_AGE_HOURS,
                use_cache: Optional[bool] = None) -> Optional[Dict[str, Any]]:
    """
    The stored result for `key`, or None.

    Unreadable entries are removed. Entries older than `max_age_hours` or
    carrying another signature are left in place and ignored.
    """
    if not _enabled(use_cache):
        return None

    path = Path(config.CACHE_DIR) / key
    if not path.is_file():
        return None
    try:
        entry = json.loads(path.read_text(encoding="utf-8"))
        saved = datetime.fromisoformat(entry["saved"])
        result = entry["result"]
        stored_signature = entry["signature"]
    except (OSError, ValueError, KeyError, TypeError):
        path.unlink(missing_ok=True)
        return None

    if datetime.now() - saved > timedelta(hours=max_age_hours):
        return None
    if stored_signature != signature:
        return None
    return result


def store_tuning(key: str, signature: Dict[str, Any], result: Dict[str, Any],
                 use_cache: Optional[bool] = None) -> None:
    """
    Write one entry.

    Raises:
        CacheError: If the cache directory or file cannot be written
    """
    if not _enabled(use_cache):
        return
    entry = {"saved": datetime.now().isoformat(timespec="seconds"), "signature": signature, "result": result}
    path = Path(config.CACHE_DIR) / key
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(entry, indent=2), encoding="utf-8")
    except (OSError, TypeError, ValueError) as e:
        raise CacheError(f"Unable to store tuning result {key}: {e}")


def clear_tuning_cache() -> int:
    """Delete every stored tuning result; returns how many were removed."""
    cache_dir = Path(config.CACHE_DIR)
    if not cache_dir.is_dir():
        return 0
    removed = 0
    for path in cache_dir.glob(f"*{ENTRY_SUFFIX}"):
        if path.is_file():
            path.unlink()
            removed += 1
    return removed
