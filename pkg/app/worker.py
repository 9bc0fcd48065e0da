"""Grid search coordinator: a process pool for (n, a) cells driven by asyncio.

Run with: python -m app.worker  (searches the published table range)
"""

import asyncio
import logging
import signal
import sys
from concurrent.futures import Executor, ProcessPoolExecutor

from app.config import settings
from app.exceptions import SearchInterruptedError
from app.schemas.search import SearchConfig, table_config
from app.services.checkpoint import CheckpointStore
from app.services.search import CellResult, CellTask, Solution, cell_tasks, merge, run_cell

logger = logging.getLogger(__name__)


class GridRunner:
    """Runs every cell of a SearchConfig, checkpointing as cells complete.

    Cells finish in any order; the merge sorts by (n, a, y, x), so output
    does not depend on the number of workers.
    """

    def __init__(self, config: SearchConfig, threads: int | None = None):
        self.config = config
        self.threads = threads or settings.threads
        self._shutdown_event = asyncio.Event()
        self._store = CheckpointStore(config.checkpoint, config) if config.checkpoint else None

    async def _run_task(
        self, task: CellTask, pool: Executor | None, sem: asyncio.Semaphore
    ) -> CellResult | None:
        async with sem:
            if self._shutdown_event.is_set():
                return None
            if pool is None:
                result = run_cell(task)
                await asyncio.sleep(0)
            else:
                loop = asyncio.get_running_loop()
                result = await loop.run_in_executor(pool, run_cell, task)
            if self._store:
                self._store.append_cell(result)
            logger.debug("cell_done n=%d a=%d solutions=%d", task.n, task.a, len(result.solutions))
            return result

    async def run(self) -> list[Solution]:
        done = self._store.load() if self._store else {}
        pending = [t for t in cell_tasks(self.config) if (t.n, t.a) not in done]
        logger.info(
            "grid_started cells=%d resumed=%d threads=%d strategy=%s",
            len(pending) + len(done), len(done), self.threads, self.config.strategy,
        )

        loop = asyncio.get_running_loop()
        handled: list[signal.Signals] = []
        try:
            for sig in (signal.SIGINT, signal.SIGTERM):
                loop.add_signal_handler(sig, self._handle_shutdown)
                handled.append(sig)
        except (NotImplementedError, RuntimeError):
            logger.info("Signal handlers not supported here")

        pool = ProcessPoolExecutor(max_workers=self.threads) if self.threads > 1 and len(pending) > 1 else None
        sem = asyncio.Semaphore(self.threads)
        try:
            results = await asyncio.gather(*(self._run_task(t, pool, sem) for t in pending))
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)
            for sig in handled:
                loop.remove_signal_handler(sig)

        finished = [r for r in results if r is not None]
        if len(finished) < len(pending):
            raise SearchInterruptedError(
                f"search stopped after {len(done) + len(finished)} of {len(done) + len(pending)} cells",
                detail={"checkpoint": str(self.config.checkpoint) if self.config.checkpoint else None},
            )
        solutions = merge(list(done.values()) + finished)
        if self._store:
            self._store.write_summary(cells=len(done) + len(finished), solutions=len(solutions))
        logger.info("grid_finished cells=%d solutions=%d", len(done) + len(finished), len(solutions))
        return solutions

    def _handle_shutdown(self) -> None:
        """Handle shutdown signals: running cells finish, no new cell starts."""
        logger.info("Shutdown signal received, stopping grid search...")
        self._shutdown_event.set()


def run_grid_parallel(config: SearchConfig, threads: int | None = None) -> list[Solution]:
    """Synchronous entry point used by the CLI."""
    return asyncio.run(GridRunner(config, threads).run())


async def main() -> None:
    """Search the published table range with checkpointing from settings."""
    config = table_config(checkpoint=settings.checkpoint)
    solutions = await GridRunner(config).run()
    logger.info("worker_done solutions=%d", len(solutions))


if __name__ == "__main__":
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stdout)],
    )
    try:
        asyncio.run(main())
    except SearchInterruptedError as e:
        logger.info(f"Worker interrupted: {e}")
        sys.exit(130)
    except Exception as e:
        logger.error(f"Worker failed: {e}", exc_info=True)
        sys.exit(1)
