"""RQ worker entrypoint for sweep cells.

Run this in a separate process while `khessian sweep --backend rq` (or
`auto` with Redis reachable) enqueues cells on `config.SWEEP_QUEUE`.

Usage:
  python scripts/worker.py
"""
import os
import sys

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from core import config  # noqa: E402
from utils_logging import configure_logging, get_logger  # noqa: E402

configure_logging()
logger = get_logger(__name__)

try:
    from rq import Queue, Worker
except Exception as e:
    logger.error("Missing rq/redis dependencies: %s", e)
    raise


def main():
    from redis import from_url

    try:
        conn = from_url(config.REDIS_URL)
        q = Queue(config.SWEEP_QUEUE, connection=conn)
        worker = Worker([q.name], connection=conn)
        logger.info("Starting sweep worker on queue %s", q.name)
        worker.work()
    except Exception as e:
        logger.error("Failed to connect to Redis at %s: %s", config.REDIS_URL, e)
        logger.error(
            "Ensure Redis is running or set REDIS_URL to a reachable Redis"
            " instance before starting the worker."
        )
        raise


if __name__ == "__main__":
    main()
