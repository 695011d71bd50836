"""
Run registry records and the provenance manifest written next to outputs
"""

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional


@dataclass
class RunRecordModel:
    """Database model for one CLI invocation"""

    id: Optional[int] = None
    run_id: str = ""  # hash of subcommand, inputs and seed
    subcommand: str = ""
    inputs_hash: str = ""
    seed: Optional[int] = None
    out_dir: str = ""

    status: str = "pending"  # pending, completed, failed
    exit_code: Optional[int] = None
    error_message: Optional[str] = None
    outputs: Optional[str] = None  # JSON list of file names

    created_at: Optional[str] = None
    updated_at: Optional[str] = None
    completed_at: Optional[str] = None

    @classmethod
    def from_invocation(
        cls, subcommand: str, inputs_hash: str, seed: Optional[int], out_dir: str
    ) -> "RunRecordModel":
        """Create a pending record for a run that is about to start"""
        run_id = hashlib.sha256(
            f"{subcommand}{inputs_hash}{seed}".encode()
        ).hexdigest()[:16]
        now = datetime.now().isoformat()
        return cls(
            run_id=run_id,
            subcommand=subcommand,
            inputs_hash=inputs_hash,
            seed=seed,
            out_dir=out_dir,
            created_at=now,
            updated_at=now,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for database operations"""
        return {
            "run_id": self.run_id,
            "subcommand": self.subcommand,
            "inputs_hash": self.inputs_hash,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "status": self.status,
            "exit_code": self.exit_code,
            "error_message": self.error_message,
            "outputs": self.outputs,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "completed_at": self.completed_at,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunRecordModel":
        """Create RunRecordModel from dictionary"""
        return cls(
            id=data.get("id"),
            run_id=data.get("run_id", ""),
            subcommand=data.get("subcommand", ""),
            inputs_hash=data.get("inputs_hash", ""),
            seed=data.get("seed"),
            out_dir=data.get("out_dir", ""),
            status=data.get("status", "pending"),
            exit_code=data.get("exit_code"),
            error_message=data.get("error_message"),
            outputs=data.get("outputs"),
            created_at=data.get("created_at"),
            updated_at=data.get("updated_at"),
            completed_at=data.get("completed_at"),
        )

    @property
    def output_files(self) -> List[str]:
        return json.loads(self.outputs) if self.outputs else []

    def mark_completed(self, outputs: List[str]):
        """Mark the run as finished with its committed outputs"""
        self.status = "completed"
        self.exit_code = 0
        self.outputs = json.dumps(sorted(outputs))
        self.completed_at = datetime.now().isoformat()
        self.updated_at = self.completed_at

    def mark_failed(self, error_message: str, exit_code: int):
        """Mark the run as failed"""
        self.status = "failed"
        self.exit_code = exit_code
        self.error_message = error_message
        self.updated_at = datetime.now().isoformat()


@dataclass
class RunManifest:
    """
    Provenance of one run. Holds no timestamps, so identical inputs give a
    byte-identical manifest.
    """

    subcommand: str
    inputs_hash: str
    seed: Optional[int]
    package_version: str
    libraries: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)  # name -> sha256

    def to_json(self) -> str:
        document = {
            "package": "polariscope",
            "package_version": self.package_version,
            "subcommand": self.subcommand,
            "inputs_sha256": self.inputs_hash,
            "seed": self.seed,
            "libraries": dict(sorted(self.libraries.items())),
            "outputs": dict(sorted(self.outputs.items())),
        }
        return json_text(document)


def json_text(document: Any) -> str:
    """Stable JSON rendering shared by reports and the manifest"""
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
