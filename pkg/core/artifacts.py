"""Result files: atomic CSV/JSON writers and trajectory readers.

Every artifact is rendered to text first and then written to a temporary
sibling that replaces the target with `os.replace`, so readers never see a
half-written file. Floats are printed with `repr` (shortest round-trip
form); non-finite values appear as the strings "inf", "-inf" and "nan" in
both formats so the JSON stays standard.
"""
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple
import csv
import io
import json
import logging
import math
import os

import numpy as np

from .errors import ArtifactIOError, DomainError
from .hessian_radial import ProblemSpec
from .nonlinearity import Nonlinearity, nonlinearity_from_json
from .ode_ivp import RadialTrajectory, StepControls, Termination

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ["r", "xi", "xip"]
PROFILE_COLUMNS = ["r", "u"]
SWEEP_COLUMNS = ["beta", "p", "k", "N", "rho_low", "rho_high", "K_beta", "verdict"]
VERIFY_COLUMNS = ["inequality", "lhs", "rhs", "slack", "pass"]


def format_value(value: Any) -> str:
    """CSV cell text: repr for floats, lower-case booleans, empty for None."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return x if math.isfinite(x) else format_value(x)
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def write_text(path: str, text: str) -> str:
    """Write `text` to `path` atomically and return the path.

    Raises:
        ArtifactIOError: the directory or file could not be written.
    """
    tmp = path + ".tmp"
    try:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(tmp, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except OSError as e:
        logger.exception("Failed to write artifact %s", path)
        try:
            if os.path.exists(tmp):
                os.remove(tmp)
        except OSError:
            pass
        raise ArtifactIOError(f"cannot write {path}: {e}", diagnostics={"path": path})
    logger.debug("wrote %s", path)
    return path


def dumps_json(payload: Any) -> str:
    return json.dumps(_jsonable(payload), indent=2, ensure_ascii=False) + "\n"


def write_json(path: str, payload: Any) -> str:
    return write_text(path, dumps_json(payload))


def write_csv(path: str, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> str:
    """Header plus one line per row in the fixed column order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return write_text(path, buf.getvalue())


def read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise ArtifactIOError(f"cannot read {path}: {e}", diagnostics={"path": path})


def read_json(path: str) -> Any:
    text = read_text(path)
    try:
        return json.loads(text)
    except ValueError as e:
        raise DomainError(f"{path} is not valid JSON: {e}", diagnostics={"path": path})


def read_csv(path: str) -> List[Dict[str, str]]:
    return list(csv.DictReader(io.StringIO(read_text(path))))


def _float_column(rows: Sequence[Dict[str, str]], name: str, path: str) -> np.ndarray:
    try:
        return np.array([float(row[name]) for row in rows], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise DomainError(f"{path}: column '{name}' missing or not numeric ({e})", diagnostics={"path": path})


def trajectory_rows(traj: RadialTrajectory) -> List[Dict[str, Any]]:
    return [{"r": r, "xi": x, "xip": p} for r, x, p in zip(traj.r.tolist(), traj.xi.tolist(), traj.xip.tolist())]


def sidecar_path(csv_path: str) -> str:
    stem, _ = os.path.splitext(csv_path)
    return stem + ".json"


def write_trajectory(traj: RadialTrajectory, directory: str, stem: str = "trajectory") -> Tuple[str, str]:
    """trajectory.csv (r, xi, xip) plus a JSON sidecar with spec, nonlinearity and integrator metadata."""
    csv_path = os.path.join(directory, f"{stem}.csv")
    write_csv(csv_path, TRAJECTORY_COLUMNS, trajectory_rows(traj))
    json_path = write_json(sidecar_path(csv_path), traj.metadata())
    return csv_path, json_path


def _controls_from(meta: Dict[str, Any]) -> StepControls:
    fields = {k: v for k, v in (meta or {}).items() if k in StepControls.__dataclass_fields__}
    for name, value in list(fields.items()):
        if isinstance(value, str):
            fields[name] = float(value)
    if "max_steps" in fields and fields["max_steps"] is not None:
        fields["max_steps"] = int(fields["max_steps"])
    return StepControls(**fields)


def read_trajectory(
    csv_path: str,
    json_path: Optional[str] = None,
    spec: Optional[ProblemSpec] = None,
    nl: Optional[Nonlinearity] = None,
) -> RadialTrajectory:
    """Load a trajectory written by `write_trajectory`.

    Args:
        csv_path: File with columns r, xi, xip.
        json_path: Metadata sidecar; defaults to the CSV path with a .json suffix.
        spec: Overrides the sidecar's problem.
        nl: Overrides the sidecar's nonlinearity.

    Raises:
        DomainError: a column is missing or the problem cannot be determined.
        ArtifactIOError: a file cannot be read.
    """
    rows = read_csv(csv_path)
    if len(rows) < 3:
        raise DomainError(f"{csv_path}: a trajectory needs at least 3 rows", diagnostics={"path": csv_path})
    r, xi, xip = (_float_column(rows, c, csv_path) for c in TRAJECTORY_COLUMNS)
    meta: Dict[str, Any] = {}
    side = json_path or sidecar_path(csv_path)
    if json_path is not None or os.path.exists(side):
        meta = read_json(side)
    if spec is None:
        if "spec" not in meta:
            raise DomainError(f"no problem description for {csv_path}; pass N and k or a metadata sidecar")
        s = meta["spec"]
        spec = ProblemSpec(int(s["N"]), int(s["k"]), s.get("R"), s.get("c"))
    if nl is None:
        if "nonlinearity" not in meta:
            raise DomainError(f"no nonlinearity for {csv_path}; pass --nl or a metadata sidecar")
        nl = nonlinearity_from_json(meta["nonlinearity"])
    if nl.k != spec.k:
        nl = nl.with_order(spec.k)
    termination = Termination(meta.get("termination", Termination.REACHED_RMAX.value))
    beta = float(meta.get("beta", xi[0]))
    return RadialTrajectory(
        r=r, xi=xi, xip=xip, spec=spec, nl=nl, beta=beta, termination=termination,
        controls=_controls_from(meta.get("controls", {})),
        steps=int(meta.get("steps", 0)), message=str(meta.get("message", "")),
    )


def write_profile(path: str, r: Sequence[float], u: Sequence[float]) -> str:
    rows = [{"r": a, "u": b} for a, b in zip(np.asarray(r, dtype=float).tolist(), np.asarray(u, dtype=float).tolist())]
    return write_csv(path, PROFILE_COLUMNS, rows)


def write_sweep(path: str, rows: Iterable[Dict[str, Any]]) -> str:
    return write_csv(path, SWEEP_COLUMNS, rows)


def write_verify(path: str, rows: Iterable[Dict[str, Any]]) -> str:
    return write_csv(path, VERIFY_COLUMNS, rows)
