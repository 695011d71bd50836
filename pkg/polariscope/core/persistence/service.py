"""
Run registry service using SQLite
"""

import logging
import sqlite3
import threading
from pathlib import Path
from typing import Dict, List, Optional

from ..errors import SpectrumIOError
from .models import RunRecordModel

logger = logging.getLogger(__name__)

REGISTRY_FILE = "runs.db"


class RunStorageService:
    """
    Bookkeeping of CLI runs in <out-dir>/runs.db. One instance is shared per
    database file.
    """

    _instances: Dict[Path, "RunStorageService"] = {}
    _lock = threading.Lock()

    def __new__(cls, out_dir: Path):
        db_path = (Path(out_dir) / REGISTRY_FILE).resolve()
        with cls._lock:
            if db_path not in cls._instances:
                instance = super().__new__(cls)
                instance._initialized = False
                cls._instances[db_path] = instance
        return cls._instances[db_path]

    def __init__(self, out_dir: Path):
        """Initialize the service"""
        if self._initialized:
            return
        self.db_path = (Path(out_dir) / REGISTRY_FILE).resolve()
        self._initialized = True
        self._init_database()

    def _connect(self) -> sqlite3.Connection:
        try:
            self.db_path.parent.mkdir(parents=True, exist_ok=True)
            conn = sqlite3.connect(self.db_path)
        except (OSError, sqlite3.Error) as e:
            raise SpectrumIOError(f"cannot open run registry {self.db_path}: {e}")
        conn.row_factory = sqlite3.Row
        return conn

    def _init_database(self):
        """Initialize the database schema"""
        with self._connect() as conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id TEXT NOT NULL,
                    subcommand TEXT NOT NULL,
                    inputs_hash TEXT NOT NULL,
                    seed INTEGER,
                    out_dir TEXT NOT NULL,
                    status TEXT DEFAULT 'pending',
                    exit_code INTEGER,
                    error_message TEXT,
                    outputs TEXT,
                    created_at TEXT NOT NULL,
                    updated_at TEXT NOT NULL,
                    completed_at TEXT
                )
            """)
            conn.execute("CREATE INDEX IF NOT EXISTS idx_runs_run_id ON runs(run_id)")
            conn.commit()

    def save_run(self, record: RunRecordModel) -> int:
        """
        Insert a run record

        Args:
            record: run to store

        Returns:
            The row id of the stored run
        """
        data = record.to_dict()
        columns = ", ".join(data)
        placeholders = ", ".join("?" for _ in data)
        with self._connect() as conn:
            cursor = conn.execute(
                f"INSERT INTO runs ({columns}) VALUES ({placeholders})",
                tuple(data.values()),
            )
            record.id = cursor.lastrowid
        logger.debug("registered run %s (%s)", record.run_id, record.subcommand)
        return record.id

    def update_run(self, record: RunRecordModel) -> bool:
        """Persist the status fields of a stored run"""
        if record.id is None:
            raise ValueError("run has not been saved")
        with self._connect() as conn:
            cursor = conn.execute(
                """
                UPDATE runs SET
                    status = ?, exit_code = ?, error_message = ?, outputs = ?,
                    updated_at = ?, completed_at = ?
                WHERE id = ?
            """,
                (
                    record.status,
                    record.exit_code,
                    record.error_message,
                    record.outputs,
                    record.updated_at,
                    record.completed_at,
                    record.id,
                ),
            )
            return cursor.rowcount > 0

    def get_run(self, row_id: int) -> Optional[RunRecordModel]:
        with self._connect() as conn:
            row = conn.execute("SELECT * FROM runs WHERE id = ?", (row_id,)).fetchone()
        return RunRecordModel.from_dict(dict(row)) if row else None

    def list_runs(self, limit: int = 20) -> List[RunRecordModel]:
        """Most recent runs first"""
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT * FROM runs ORDER BY id DESC LIMIT ?", (limit,)
            ).fetchall()
        return [RunRecordModel.from_dict(dict(row)) for row in rows]

    def count_runs(self) -> int:
        with self._connect() as conn:
            return conn.execute("SELECT COUNT(*) FROM runs").fetchone()[0]
