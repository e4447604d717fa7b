"""
Verification Ledger
===================

Append-only SQLite record of verification runs. Each run stores its suite,
parameters, verdict summary and the SHA-256 of its canonical JSON report;
a hash chain links every run to the one before it, so later edits to a
stored run are detectable.
"""

import hashlib
import json
import logging
import os
import uuid
from contextlib import asynccontextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import aiosqlite

logger = logging.getLogger(__name__)

BUSY_TIMEOUT_ENV = "BERNOULLI_BOUNDS_LEDGER_BUSY_TIMEOUT_MS"


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class VerificationLedger:
    """
    Ledger of verification runs backed by aiosqlite.

    Nothing is written until ``record_run`` is called; the database file is
    created at ``db_path`` on first use.
    """

    def __init__(self, db_path: Union[str, Path]):
        self.db_path = str(db_path)
        self.sqlite_busy_timeout_ms = max(1000, int(os.getenv(BUSY_TIMEOUT_ENV, "5000")))
        self.sqlite_connect_timeout_seconds = max(1.0, self.sqlite_busy_timeout_ms / 1000.0)
        self._initialized = False

    @asynccontextmanager
    async def _db_connection(self):
        """Open a SQLite connection with reliability settings."""
        async with aiosqlite.connect(self.db_path, timeout=self.sqlite_connect_timeout_seconds) as db:
            await db.execute("PRAGMA foreign_keys = ON")
            await db.execute(f"PRAGMA busy_timeout = {self.sqlite_busy_timeout_ms}")
            yield db

    async def initialize(self):
        """Create the tables if they do not exist."""
        if self._initialized:
            return
        parent = Path(self.db_path).parent
        parent.mkdir(parents=True, exist_ok=True)
        try:
            async with self._db_connection() as db:
                await db.execute("""
                    CREATE TABLE IF NOT EXISTS runs (
                        id TEXT PRIMARY KEY,
                        suite TEXT NOT NULL,
                        parameters_json TEXT NOT NULL,
                        summary_json TEXT NOT NULL,
                        report_hash TEXT NOT NULL,
                        status TEXT NOT NULL,
                        recorded_at TEXT NOT NULL
                    )
                """)
                await db.execute("""
                    CREATE TABLE IF NOT EXISTS chain (
                        id INTEGER PRIMARY KEY AUTOINCREMENT,
                        run_id TEXT NOT NULL,
                        previous_hash TEXT,
                        current_hash TEXT NOT NULL,
                        chain_position INTEGER NOT NULL,
                        verification_data TEXT NOT NULL,
                        FOREIGN KEY (run_id) REFERENCES runs (id)
                    )
                """)
                await db.execute(
                    "CREATE UNIQUE INDEX IF NOT EXISTS idx_chain_position ON chain(chain_position)"
                )
                await db.commit()
            self._initialized = True
            logger.info(f"Verification ledger ready at {self.db_path}")
        except Exception as e:
            logger.error(f"Failed to initialize verification ledger: {str(e)}")
            raise

    async def record_run(
        self,
        suite: str,
        parameters: Dict[str, Any],
        summary: Dict[str, int],
        status: str,
        report_json: str,
    ) -> Dict[str, Any]:
        """
        Store one run and extend the hash chain.

        Args:
            suite: Verification suite name
            parameters: Ranges and settings the run used
            summary: Verdict counts
            status: Overall verdict of the run
            report_json: Canonical JSON of the emitted report

        Returns:
            The stored chain entry
        """
        await self.initialize()
        run_id = str(uuid.uuid4())
        report_hash = _sha256(report_json)
        recorded_at = datetime.now(timezone.utc).isoformat()

        async with self._db_connection() as db:
            # the position read and both inserts form one write transaction
            await db.execute("BEGIN IMMEDIATE")
            try:
                entry = await self._append(
                    db, run_id, suite, parameters, summary, status, report_hash, recorded_at
                )
            except Exception:
                await db.rollback()
                raise
            await db.commit()

        logger.info(f"Recorded {suite} run {run_id} at chain position {entry['chain_position']}")
        return entry

    async def _append(
        self,
        db: aiosqlite.Connection,
        run_id: str,
        suite: str,
        parameters: Dict[str, Any],
        summary: Dict[str, int],
        status: str,
        report_hash: str,
        recorded_at: str,
    ) -> Dict[str, Any]:
        """Insert one run and its chain entry after the current chain head."""
        async with db.execute(
            "SELECT current_hash, chain_position FROM chain ORDER BY chain_position DESC LIMIT 1"
        ) as cursor:
            last = await cursor.fetchone()
        previous_hash = last[0] if last else None
        position = (last[1] + 1) if last else 0

        verification_data = json.dumps(
            {
                "run_id": run_id,
                "suite": suite,
                "report_hash": report_hash,
                "previous_hash": previous_hash,
                "chain_position": position,
            },
            sort_keys=True,
        )
        current_hash = _sha256(verification_data)

        await db.execute(
            """INSERT INTO runs
               (id, suite, parameters_json, summary_json, report_hash, status, recorded_at)
               VALUES (?, ?, ?, ?, ?, ?, ?)""",
            (
                run_id,
                suite,
                json.dumps(parameters, sort_keys=True),
                json.dumps(summary, sort_keys=True),
                report_hash,
                status,
                recorded_at,
            ),
        )
        await db.execute(
            """INSERT INTO chain
               (run_id, previous_hash, current_hash, chain_position, verification_data)
               VALUES (?, ?, ?, ?, ?)""",
            (run_id, previous_hash, current_hash, position, verification_data),
        )
        return {
            "run_id": run_id,
            "report_hash": report_hash,
            "previous_hash": previous_hash,
            "current_hash": current_hash,
            "chain_position": position,
        }

    async def list_runs(self) -> List[Dict[str, Any]]:
        await self.initialize()
        async with self._db_connection() as db:
            async with db.execute(
                """SELECT r.id, r.suite, r.status, r.summary_json, r.report_hash, c.chain_position
                   FROM runs r JOIN chain c ON c.run_id = r.id
                   ORDER BY c.chain_position"""
            ) as cursor:
                rows = await cursor.fetchall()
        return [
            {
                "run_id": row[0],
                "suite": row[1],
                "status": row[2],
                "summary": json.loads(row[3]),
                "report_hash": row[4],
                "chain_position": row[5],
            }
            for row in rows
        ]

    async def verify_integrity(self) -> Dict[str, Any]:
        """
        Recompute every chain hash and check the links and stored report hashes.

        Returns:
            ``overall_status`` ("verified", "failed" or "error") plus per-check details
        """
        results: Dict[str, Any] = {"overall_status": "verified", "checks": {}, "problems": []}
        try:
            await self.initialize()
            async with self._db_connection() as db:
                async with db.execute(
                    """SELECT c.run_id, c.previous_hash, c.current_hash, c.chain_position,
                              c.verification_data, r.report_hash
                       FROM chain c LEFT JOIN runs r ON r.id = c.run_id
                       ORDER BY c.chain_position"""
                ) as cursor:
                    entries = await cursor.fetchall()

            expected_previous: Optional[str] = None
            for position, (run_id, previous, current, stored_position, data, report_hash) in enumerate(entries):
                if stored_position != position:
                    results["problems"].append(f"{run_id}: chain position {stored_position}, expected {position}")
                if previous != expected_previous:
                    results["problems"].append(f"{run_id}: broken link to previous run")
                if _sha256(data) != current:
                    results["problems"].append(f"{run_id}: chain hash mismatch")
                if report_hash is None or json.loads(data).get("report_hash") != report_hash:
                    results["problems"].append(f"{run_id}: stored report hash altered")
                expected_previous = current

            results["checks"]["entries"] = len(entries)
            if results["problems"]:
                results["overall_status"] = "failed"
            logger.info(f"Ledger verification completed: {results['overall_status']}")
        except Exception as e:
            logger.error(f"Ledger verification failed: {str(e)}")
            results["overall_status"] = "error"
            results["error"] = str(e)
        return results
