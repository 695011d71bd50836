"""
Staged run outputs that reach the output directory only on success
"""

import logging
import os
from importlib import metadata
from pathlib import Path
from typing import Dict, List, Optional

from ..errors import SpectrumIOError
from .models import RunManifest, sha256_text
from .spectrum_io import write_text_file

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
TRACKED_LIBRARIES = ("numpy", "scipy", "pydantic", "rich")


def library_versions() -> Dict[str, str]:
    versions = {}
    for name in TRACKED_LIBRARIES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


class OutputBundle:
    """
    In-memory set of text outputs. Nothing touches the disk until commit(),
    which writes every file next to a temporary name and then renames them
    into place, the manifest last.
    """

    def __init__(self, subcommand: str, inputs_hash: str, seed: Optional[int]):
        self.subcommand = subcommand
        self.inputs_hash = inputs_hash
        self.seed = seed
        self._files: Dict[str, str] = {}

    def add(self, name: str, text: str) -> None:
        if name == MANIFEST_FILE or "/" in name or "\\" in name:
            raise ValueError(f"invalid output name {name!r}")
        if name in self._files:
            raise ValueError(f"output {name!r} staged twice")
        self._files[name] = text

    def names(self) -> List[str]:
        return sorted(self._files)

    def text(self, name: str) -> str:
        return self._files[name]

    def manifest(self, package_version: str) -> RunManifest:
        return RunManifest(
            subcommand=self.subcommand,
            inputs_hash=self.inputs_hash,
            seed=self.seed,
            package_version=package_version,
            libraries=library_versions(),
            outputs={name: sha256_text(text) for name, text in self._files.items()},
        )

    def commit(self, out_dir: Path, package_version: str) -> List[Path]:
        """
        Write all staged files, then the manifest.

        Every file is first written under a temporary name. Data files are
        renamed into place before the manifest, so a manifest on disk always
        describes a complete set. On failure the files already renamed and
        all temporaries are removed.

        Returns:
            Paths of the written files, manifest last

        Raises:
            SpectrumIOError: the directory or a file cannot be written
        """
        out_dir = Path(out_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise SpectrumIOError(f"cannot create {out_dir}: {e}")

        files = [(name, self._files[name]) for name in self.names()]
        files.append((MANIFEST_FILE, self.manifest(package_version).to_json()))
        staged, written = [], []
        try:
            for name, text in files:
                temporary = out_dir / f".{name}.partial"
                staged.append((temporary, out_dir / name))
                write_text_file(temporary, text)
            for temporary, final in staged:
                os.replace(temporary, final)
                written.append(final)
        except (OSError, SpectrumIOError) as e:
            for path in written + [temporary for temporary, _ in staged]:
                try:
                    path.unlink()
                except FileNotFoundError:
                    pass
            raise SpectrumIOError(f"cannot commit outputs to {out_dir}: {e}")
        logger.info("wrote %d files to %s", len(written), out_dir)
        return written
