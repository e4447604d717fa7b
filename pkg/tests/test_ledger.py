#!/usr/bin/env python3
"""
Tests for the hash-chained verification ledger.
"""

import asyncio
import os
import sys
import tempfile
import unittest
from pathlib import Path

import aiosqlite

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.bernoulli_bounds.ledger import BUSY_TIMEOUT_ENV, VerificationLedger


class TestVerificationLedger(unittest.IsolatedAsyncioTestCase):
    """Recording runs and checking the chain."""

    async def asyncSetUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.db_path = Path(self.tmp.name) / "ledger" / "runs.db"
        self.ledger = VerificationLedger(self.db_path)

    async def asyncTearDown(self):
        self.tmp.cleanup()

    async def _record(self, suite="theorem1", report='{"rows": []}'):
        return await self.ledger.record_run(
            suite, {"kmax": 2}, {"pass": 4, "fail": 0, "inconclusive": 0}, "pass", report
        )

    async def test_nothing_written_before_first_run(self):
        self.assertFalse(self.db_path.exists())
        await self._record()
        self.assertTrue(self.db_path.exists())

    async def test_chain_links_runs(self):
        first = await self._record()
        second = await self._record("lemma1", '{"rows": [1]}')
        self.assertIsNone(first["previous_hash"])
        self.assertEqual(second["previous_hash"], first["current_hash"])
        self.assertEqual([first["chain_position"], second["chain_position"]], [0, 1])

        runs = await self.ledger.list_runs()
        self.assertEqual([run["suite"] for run in runs], ["theorem1", "lemma1"])
        self.assertEqual(runs[0]["summary"]["pass"], 4)

        outcome = await self.ledger.verify_integrity()
        self.assertEqual(outcome["overall_status"], "verified")
        self.assertEqual(outcome["checks"]["entries"], 2)

    async def test_concurrent_runs_get_distinct_positions(self):
        await self._record()
        writers = [VerificationLedger(self.db_path) for _ in range(2)]
        entries = await asyncio.gather(*(
            writers[i % 2].record_run(
                "theorem3", {"nmax": i}, {"pass": i, "fail": 0, "inconclusive": 0}, "pass", f'{{"run": {i}}}'
            )
            for i in range(8)
        ))
        self.assertEqual(sorted(entry["chain_position"] for entry in entries), list(range(1, 9)))
        outcome = await self.ledger.verify_integrity()
        self.assertEqual(outcome["overall_status"], "verified")
        self.assertEqual(outcome["checks"]["entries"], 9)

    async def test_tampering_detected(self):
        await self._record()
        await self._record()
        async with aiosqlite.connect(str(self.db_path)) as db:
            await db.execute("UPDATE runs SET report_hash = 'altered' WHERE suite = 'theorem1'")
            await db.commit()
        outcome = await self.ledger.verify_integrity()
        self.assertEqual(outcome["overall_status"], "failed")
        self.assertTrue(any("report hash" in problem for problem in outcome["problems"]))

    async def test_busy_timeout_from_environment(self):
        os.environ[BUSY_TIMEOUT_ENV] = "250"
        try:
            ledger = VerificationLedger(self.db_path)
        finally:
            del os.environ[BUSY_TIMEOUT_ENV]
        self.assertEqual(ledger.sqlite_busy_timeout_ms, 1000)


if __name__ == "__main__":
    unittest.main()
