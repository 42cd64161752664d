"""Sweep fan-out: RQ (Redis Queue) when a server is reachable, a local process pool otherwise.

Each sweep cell (beta, p, k, N) is independent. `run_sweep` looks every
cell up in the file cache first, computes the missing ones on the chosen
backend, stores them, and returns rows in the Cartesian cell order so the
CSV written from them is deterministic. The RQ worker is
`scripts/worker.py`, listening on `config.SWEEP_QUEUE`.
"""
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from typing import Any, Dict, List, Optional, Sequence
import logging
import math
import time

from . import cache, config
from .errors import ConfigError, DomainError, NumericalFailure
from .hessian_radial import ProblemSpec
from .nonlinearity import PowerLaw, ko_integral
from .ode_ivp import blowup_radius

logger = logging.getLogger(__name__)

# Pre-declare variables with Any so mypy won't complain when we assign None
redis: Any = None
Queue: Any = None
get_current_job: Any = None
Job: Any = None
try:
    import redis
    from rq import Queue, get_current_job
    from rq.job import Job
except Exception:
    redis = None
    Queue = None
    get_current_job = None
    Job = None

BACKENDS = ("auto", "local", "rq")


def sweep_cells(betas: Sequence[float], ps: Sequence[float], ks: Sequence[int], Ns: Sequence[int],
                r_max: float = config.DEFAULT_RMAX) -> List[Dict[str, Any]]:
    """Cartesian product in (beta, p, k, N) order; cells with k > N are skipped."""
    cells = []
    for beta, p, k, N in product(betas, ps, ks, Ns):
        if k > N:
            logger.info("skipping sweep cell k=%d > N=%d", k, N)
            continue
        cells.append({"beta": float(beta), "p": float(p), "k": int(k), "N": int(N), "r_max": float(r_max)})
    if not cells:
        raise DomainError("sweep grid has no cell with k <= N")
    return cells


def run_sweep_cell(cell: Dict[str, Any]) -> Dict[str, Any]:
    """Blow-up bracket and K(beta) for one (beta, p, k, N) cell as a sweep CSV row.

    Numerical failures are recorded in the row's verdict so one bad cell
    does not abort the sweep.
    """
    beta, k, N = cell["beta"], cell["k"], cell["N"]
    row: Dict[str, Any] = {"beta": beta, "p": cell["p"], "k": k, "N": N}
    nl = PowerLaw(p=cell["p"], k=k)
    try:
        K = ko_integral(nl, beta)
        row["K_beta"] = K.value if K.converges else math.inf
        est = blowup_radius(ProblemSpec(N, k), nl, beta, r_max=cell.get("r_max", config.DEFAULT_RMAX))
        row.update(rho_low=est.rho_low, rho_high=est.rho_high, verdict=est.verdict.value)
    except NumericalFailure as e:
        logger.warning("sweep cell %s failed: %s", cell, e)
        row.setdefault("K_beta", math.nan)
        row.update(rho_low=math.nan, rho_high=math.nan, verdict=f"failed:{type(e).__name__}")
    return row


def _get_redis_conn():
    if redis is None:
        raise RuntimeError("redis package not installed")
    return redis.from_url(config.REDIS_URL)


def rq_available() -> bool:
    if Queue is None:
        return False
    try:
        return bool(_get_redis_conn().ping())
    except Exception as e:
        logger.debug("Redis at %s unreachable: %s", config.REDIS_URL, e)
        return False


def enqueue_sweep(cells: Sequence[Dict[str, Any]]) -> List[str]:
    """Enqueue one job per cell, return the job ids.

    Raises RuntimeError if Redis isn't available.
    """
    if Queue is None:
        raise RuntimeError("rq/redis not available")
    conn = _get_redis_conn()
    q = Queue(config.SWEEP_QUEUE, connection=conn)
    return [q.enqueue(_sweep_job, cell).id for cell in cells]


def get_job_status(job_id: str) -> dict:
    if Job is None:
        return {"status": "unavailable"}
    try:
        conn = _get_redis_conn()
        job = Job.fetch(job_id, connection=conn)
        meta = job.meta or {}
        return {"status": job.get_status(), "meta": meta, "result": job.result}
    except Exception as e:
        logger.exception("Failed to fetch job status for %s", job_id)
        return {"status": "error", "error": str(e)}


def wait_for_jobs(job_ids: Sequence[str], timeout: float = 3600.0, poll: float = 0.5) -> List[Dict[str, Any]]:
    """Block until every job finished and return their results in order.

    Raises:
        NumericalFailure: a job failed or the timeout expired.
    """
    deadline = time.monotonic() + timeout
    results: Dict[str, Dict[str, Any]] = {}
    while len(results) < len(job_ids):
        for job_id in job_ids:
            if job_id in results:
                continue
            status = get_job_status(job_id)
            state = str(status.get("status"))
            if state.endswith("finished"):
                results[job_id] = status["result"]
            elif state.endswith("failed") or state in ("error", "unavailable"):
                raise NumericalFailure(f"sweep job {job_id} ended with status {state}", diagnostics=status)
        if len(results) < len(job_ids):
            if time.monotonic() > deadline:
                raise NumericalFailure(
                    f"sweep jobs still pending after {timeout} s",
                    partial=len(results), diagnostics={"pending": len(job_ids) - len(results)},
                )
            time.sleep(poll)
    return [results[j] for j in job_ids]


def _sweep_job(cell: Dict[str, Any]) -> Dict[str, Any]:
    """Internal worker function executed by RQ; records the cell in job.meta."""
    job = None
    if get_current_job is not None:
        try:
            job = get_current_job()
        except Exception:
            job = None
    if job is not None:
        job.meta["cell"] = cell
        job.meta["status"] = "running"
        job.save_meta()
    row = run_sweep_cell(cell)
    if job is not None:
        job.meta["status"] = row["verdict"]
        job.save_meta()
    return row


def _run_local(cells: Sequence[Dict[str, Any]], workers: Optional[int]) -> List[Dict[str, Any]]:
    if workers == 1 or len(cells) == 1:
        return [run_sweep_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_sweep_cell, cells))


def resolve_backend(backend: Optional[str] = None) -> str:
    name = (backend or config.SWEEP_BACKEND).lower()
    if name not in BACKENDS:
        raise ConfigError(f"unknown sweep backend '{name}'; expected one of {BACKENDS}", field="backend")
    if name == "local":
        return name
    if rq_available():
        return "rq"
    if name == "rq":
        raise ConfigError(f"sweep backend 'rq' requested but Redis at {config.REDIS_URL} is unreachable",
                          field="backend")
    logger.warning("RQ unavailable; running the sweep on a local process pool")
    return "local"


def run_sweep(cells: Sequence[Dict[str, Any]], backend: Optional[str] = None, workers: Optional[int] = None,
              use_cache: bool = True) -> List[Dict[str, Any]]:
    """Rows for every cell, in the order of `cells`."""
    keys = [cache.cell_key(c) for c in cells]
    rows: List[Optional[Dict[str, Any]]] = [cache.get_cached(k) if use_cache else None for k in keys]
    missing = [i for i, row in enumerate(rows) if row is None]
    logger.info("sweep: %d cells, %d cached", len(cells), len(cells) - len(missing))
    if missing:
        todo = [cells[i] for i in missing]
        chosen = resolve_backend(backend)
        if chosen == "rq":
            computed = wait_for_jobs(enqueue_sweep(todo))
        else:
            computed = _run_local(todo, workers)
        for i, row in zip(missing, computed):
            rows[i] = row
            if use_cache and not str(row.get("verdict", "")).startswith("failed"):
                cache.set_cached(keys[i], row)
    return [row for row in rows if row is not None]
