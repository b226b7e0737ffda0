"""Read-only views of a repository tree at a fixed revision.

A snapshot is either backed by a checked-out directory (production) or by an
in-memory mapping (fixtures, golden bundles). The on-disk cache layout is
``cache/<repo>/<commit>/`` with one shallow checkout per commit.
"""

from __future__ import annotations

import subprocess
from collections.abc import Iterator, Mapping
from pathlib import Path

from ..errors import ImagePreparationFailed


class Snapshot:
    """Immutable file tree addressed by repo-relative posix paths."""

    def __init__(
        self,
        root: Path | str | None = None,
        files: Mapping[str, str] | None = None,
    ):
        if (root is None) == (files is None):
            raise ValueError("exactly one of root/files must be given")
        self._root = Path(root) if root is not None else None
        self._files = dict(files) if files is not None else None

    @classmethod
    def from_dict(cls, files: Mapping[str, str]) -> "Snapshot":
        return cls(files=files)

    @property
    def root(self) -> Path | None:
        return self._root

    def exists(self, path: str) -> bool:
        if self._files is not None:
            return path in self._files
        return (self._root / path).is_file()  # type: ignore[operator]

    def read_text(self, path: str) -> str:
        if self._files is not None:
            return self._files[path]
        return (self._root / path).read_text(encoding="utf-8")  # type: ignore[operator]

    def walk(self) -> Iterator[str]:
        """Yield every file path in the snapshot, sorted."""
        if self._files is not None:
            yield from sorted(self._files)
            return
        assert self._root is not None
        for p in sorted(self._root.rglob("*")):
            if p.is_file() and ".git" not in p.parts:
                yield p.relative_to(self._root).as_posix()

    def materialize(self, dest: Path) -> Path:
        """Write the snapshot's files under ``dest`` and return it."""
        for path in self.walk():
            target = dest / path
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(self.read_text(path), encoding="utf-8")
        return dest


class SnapshotStore:
    """Disk cache of shallow checkouts, keyed by (repo, commit)."""

    def __init__(self, cache_dir: Path | str):
        self.cache_dir = Path(cache_dir)

    def path_for(self, repo_id: str, commit: str) -> Path:
        # cache/<owner>/<name>/<commit>
        return self.cache_dir.joinpath(*repo_id.split("/")) / commit

    def ensure(self, repo_id: str, commit: str, clone_url: str) -> Snapshot:
        """Return a snapshot of ``commit``, fetching it on first use."""
        dest = self.path_for(repo_id, commit)
        marker = dest / ".complete"
        if marker.exists():
            return Snapshot(root=dest)
        dest.mkdir(parents=True, exist_ok=True)
        try:
            self._git(dest, "init", "-q")
            self._git(dest, "remote", "add", "origin", clone_url)
            self._git(dest, "fetch", "-q", "--depth", "1", "origin", commit)
            self._git(dest, "checkout", "-q", "FETCH_HEAD")
        except subprocess.CalledProcessError as exc:
            raise ImagePreparationFailed(
                f"shallow checkout of {repo_id}@{commit} failed: {exc.stderr or exc}"
            ) from exc
        marker.touch()
        return Snapshot(root=dest)

    @staticmethod
    def _git(cwd: Path, *args: str) -> None:
        subprocess.run(
            ["git", *args], cwd=cwd, check=True, capture_output=True, text=True
        )
