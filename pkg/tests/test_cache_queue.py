import math
import os
import sys
import time

import pytest

# Ensure the package root (one level up) is on sys.path so tests can import `core`.
ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from core import cache, config, queue  # noqa: E402
from core.errors import ConfigError, DomainError, NumericalFailure  # noqa: E402


@pytest.fixture(autouse=True)
def isolated_cache(monkeypatch, tmp_path):
    monkeypatch.setattr(config, "CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path / "cache"


def test_cache_round_trip_and_key_order():
    key = cache.cell_key({"beta": 1.0, "p": 2.0, "k": 1, "N": 3})
    assert key == cache.cell_key({"N": 3, "k": 1, "p": 2.0, "beta": 1.0})
    assert cache.get_cached(key) is None
    cache.set_cached(key, {"verdict": "blowup", "rho_high": math.inf})
    assert cache.get_cached(key) == {"verdict": "blowup", "rho_high": math.inf}


def test_cache_ttl_expiry(isolated_cache):
    cache.set_cached("short-lived", {"x": 1}, ttl_seconds=-1)
    assert cache.get_cached("short-lived") is None
    assert os.listdir(str(isolated_cache)) == []


def test_cache_ignores_corrupt_files():
    cache.set_cached("entry", {"x": 1})
    with open(cache._key_to_path("entry"), "w", encoding="utf-8") as f:
        f.write("{not json")
    assert cache.get_cached("entry") is None


def test_purge_cache_removes_old_entries():
    cache.set_cached("old", 1)
    cache.set_cached("new", 2)
    old_path = cache._key_to_path("old")
    stamp = time.time() - 3600
    os.utime(old_path, (stamp, stamp))
    assert cache.get_last_cleanup() == 0.0
    assert cache.purge_cache(older_than_seconds=60) == 1
    assert cache.get_cached("old") is None
    assert cache.get_cached("new") == 2
    assert cache.get_last_cleanup() > 0


def test_sweep_cells_order_and_skip():
    cells = queue.sweep_cells([1.0, 2.0], [2.0], [1, 3], [2, 3], r_max=10.0)
    assert [(c["beta"], c["k"], c["N"]) for c in cells] == [
        (1.0, 1, 2), (1.0, 1, 3), (1.0, 3, 3), (2.0, 1, 2), (2.0, 1, 3), (2.0, 3, 3),
    ]
    assert all(c["r_max"] == 10.0 for c in cells)
    with pytest.raises(DomainError):
        queue.sweep_cells([1.0], [2.0], [3], [2])


def test_run_sweep_cell_blowup_row():
    row = queue.run_sweep_cell({"beta": 1.0, "p": 2.0, "k": 1, "N": 3, "r_max": 1e3})
    assert row["verdict"] == "blowup"
    assert row["rho_low"] <= row["rho_high"] <= row["rho_low"] + 1e-4
    assert row["K_beta"] == pytest.approx(2.9745, abs=1e-3)
    assert row["K_beta"] <= row["rho_low"]


def test_run_sweep_cell_records_failures(monkeypatch):
    def failing(*args, **kwargs):
        raise NumericalFailure("bracket did not close")

    monkeypatch.setattr("core.queue.blowup_radius", failing)
    row = queue.run_sweep_cell({"beta": 1.0, "p": 2.0, "k": 1, "N": 3})
    assert row["verdict"] == "failed:NumericalFailure"
    assert math.isnan(row["rho_low"]) and math.isnan(row["rho_high"])


def test_run_sweep_uses_the_cache(monkeypatch):
    calls = []

    def fake_cell(cell):
        calls.append(cell)
        return {"beta": cell["beta"], "p": cell["p"], "k": cell["k"], "N": cell["N"],
                "rho_low": 1.0, "rho_high": 1.0, "K_beta": 0.5, "verdict": "blowup"}

    monkeypatch.setattr("core.queue.run_sweep_cell", fake_cell)
    cells = queue.sweep_cells([1.0, 2.0], [2.0], [1], [3])
    rows = queue.run_sweep(cells, backend="local", workers=1)
    assert [r["beta"] for r in rows] == [1.0, 2.0]
    assert len(calls) == 2

    # second run is served from the cache
    calls.clear()
    again = queue.run_sweep(cells, backend="local", workers=1)
    assert calls == []
    assert again == rows

    # bypassing the cache recomputes
    queue.run_sweep(cells, backend="local", workers=1, use_cache=False)
    assert len(calls) == 2


def test_run_sweep_does_not_cache_failures(monkeypatch):
    calls = []

    def fake_cell(cell):
        calls.append(cell)
        return {"beta": cell["beta"], "p": cell["p"], "k": cell["k"], "N": cell["N"],
                "rho_low": math.nan, "rho_high": math.nan, "K_beta": math.nan, "verdict": "failed:BracketingFailure"}

    monkeypatch.setattr("core.queue.run_sweep_cell", fake_cell)
    cells = queue.sweep_cells([1.0], [2.0], [1], [3])
    queue.run_sweep(cells, backend="local", workers=1)
    queue.run_sweep(cells, backend="local", workers=1)
    assert len(calls) == 2


def test_resolve_backend(monkeypatch):
    monkeypatch.setattr("core.queue.rq_available", lambda: False)
    assert queue.resolve_backend("local") == "local"
    assert queue.resolve_backend("auto") == "local"
    with pytest.raises(ConfigError) as exc:
        queue.resolve_backend("rq")
    assert exc.value.field == "backend"
    with pytest.raises(ConfigError):
        queue.resolve_backend("celery")
    monkeypatch.setattr("core.queue.rq_available", lambda: True)
    assert queue.resolve_backend("auto") == "rq"


def test_wait_for_jobs(monkeypatch):
    statuses = {"a": {"status": "finished", "result": {"beta": 1.0}},
                "b": {"status": "finished", "result": {"beta": 2.0}}}
    monkeypatch.setattr("core.queue.get_job_status", lambda job_id: statuses[job_id])
    assert queue.wait_for_jobs(["b", "a"], poll=0.0) == [{"beta": 2.0}, {"beta": 1.0}]
    statuses["b"] = {"status": "failed"}
    with pytest.raises(NumericalFailure):
        queue.wait_for_jobs(["a", "b"], poll=0.0)
    statuses["b"] = {"status": "queued"}
    with pytest.raises(NumericalFailure):
        queue.wait_for_jobs(["a", "b"], timeout=-1.0, poll=0.0)


def test_sweep_job_without_rq(monkeypatch):
    monkeypatch.setattr("core.queue.get_current_job", None)
    monkeypatch.setattr("core.queue.run_sweep_cell", lambda cell: {"verdict": "blowup", **cell})
    assert queue._sweep_job({"beta": 1.0})["verdict"] == "blowup"


def test_enqueue_requires_rq(monkeypatch):
    monkeypatch.setattr("core.queue.Queue", None)
    with pytest.raises(RuntimeError):
        queue.enqueue_sweep([{"beta": 1.0}])
    monkeypatch.setattr("core.queue.Job", None)
    assert queue.get_job_status("x") == {"status": "unavailable"}
