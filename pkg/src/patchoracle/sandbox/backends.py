"""Sandbox backends: container (production), plain subprocess with a
temp-directory jail (tests/CI), and a stub replaying recorded outcomes
(golden bundles)."""

from __future__ import annotations

import os
import shutil
import signal
import subprocess
import sys
import tempfile
import uuid
import time
from pathlib import Path

from ..errors import SandboxUnavailable
from .result import RawOutcome

_RUNNER_FILE = "_oracle_runner.py"
_PROGRAM_FILE = "program.py"


class SubprocessSandbox:
    """Runs comparison programs under the runner in a throwaway directory.

    Isolation is working-directory level only (fresh cwd, minimal
    environment); it exists so test suites and CI can run without a
    container daemon. ``pythonpath`` makes the subject package importable
    inside the jail.
    """

    def __init__(
        self,
        shim_path: Path | str,
        interpreter: str | None = None,
        timeout: float = 120.0,
        pythonpath: tuple[str, ...] = (),
    ):
        self.shim_path = Path(shim_path)
        self.interpreter = interpreter or sys.executable
        self.timeout = timeout
        self.pythonpath = tuple(pythonpath)
        if not self.shim_path.is_file():
            raise SandboxUnavailable(f"runner shim not found at {self.shim_path}")

    def run(self, program_source: str, workdir: Path | None = None) -> RawOutcome:
        jail = Path(tempfile.mkdtemp(prefix="oracle-", dir=workdir))
        try:
            (jail / _PROGRAM_FILE).write_text(program_source, encoding="utf-8")
            shutil.copyfile(self.shim_path, jail / _RUNNER_FILE)
            env = {
                "PATH": os.environ.get("PATH", "/usr/bin:/bin"),
                "HOME": str(jail),
                "LANG": "C.UTF-8",
            }
            if self.pythonpath:
                env["PYTHONPATH"] = os.pathsep.join(self.pythonpath)
            start = time.monotonic()
            proc = subprocess.Popen(
                [self.interpreter, _RUNNER_FILE, _PROGRAM_FILE],
                cwd=jail,
                env=env,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                errors="replace",
                start_new_session=True,  # own process group, killable as a tree
            )
            try:
                stdout, stderr = proc.communicate(timeout=self.timeout)
                return RawOutcome(
                    exit_code=proc.returncode,
                    stdout=stdout,
                    stderr=stderr,
                    duration=time.monotonic() - start,
                )
            except subprocess.TimeoutExpired as exc:
                self._kill_group(proc.pid)
                try:
                    stdout, stderr = proc.communicate(timeout=5)
                except subprocess.TimeoutExpired:
                    stdout, stderr = _decode(exc.stdout), _decode(exc.stderr)
                return RawOutcome(
                    exit_code=None,
                    stdout=stdout or _decode(exc.stdout),
                    stderr=stderr or _decode(exc.stderr),
                    timed_out=True,
                    duration=self.timeout,
                )
        finally:
            shutil.rmtree(jail, ignore_errors=True)

    @staticmethod
    def _kill_group(pid: int) -> None:
        try:
            os.killpg(pid, signal.SIGKILL)
        except (ProcessLookupError, PermissionError):
            try:
                os.kill(pid, signal.SIGKILL)
            except (ProcessLookupError, PermissionError):
                pass


class ContainerSandbox:
    """Runs comparison programs inside a container with networking disabled.

    One image per (repo, base commit) is expected to exist with the subject
    package installed; the post-patch function travels inside the comparison
    program itself.
    """

    def __init__(
        self,
        image: str,
        shim_path: Path | str,
        timeout: float = 120.0,
        docker_binary: str = "docker",
    ):
        self.image = image
        self.shim_path = Path(shim_path)
        self.timeout = timeout
        self.docker = docker_binary
        if shutil.which(self.docker) is None:
            raise SandboxUnavailable(f"container runtime {self.docker!r} not on PATH")
        if not self.shim_path.is_file():
            raise SandboxUnavailable(f"runner shim not found at {self.shim_path}")

    def run(self, program_source: str, workdir: Path | None = None) -> RawOutcome:
        jail = Path(tempfile.mkdtemp(prefix="oracle-", dir=workdir))
        container = f"oracle-{uuid.uuid4().hex[:12]}"
        try:
            (jail / _PROGRAM_FILE).write_text(program_source, encoding="utf-8")
            shutil.copyfile(self.shim_path, jail / _RUNNER_FILE)
            cmd = [
                self.docker,
                "run",
                "--rm",
                "--name",
                container,
                "--network",
                "none",
                "-v",
                f"{jail}:/work",
                "-w",
                "/work",
                self.image,
                "python",
                _RUNNER_FILE,
                _PROGRAM_FILE,
            ]
            start = time.monotonic()
            try:
                proc = subprocess.run(
                    cmd, capture_output=True, text=True, encoding="utf-8",
                    errors="replace", timeout=self.timeout,
                )
                return RawOutcome(
                    exit_code=proc.returncode,
                    stdout=proc.stdout,
                    stderr=proc.stderr,
                    duration=time.monotonic() - start,
                )
            except subprocess.TimeoutExpired as exc:
                subprocess.run(
                    [self.docker, "kill", container], capture_output=True, timeout=30
                )
                return RawOutcome(
                    exit_code=None,
                    stdout=_decode(exc.stdout),
                    stderr=_decode(exc.stderr),
                    timed_out=True,
                    duration=self.timeout,
                )
        finally:
            shutil.rmtree(jail, ignore_errors=True)


class StubSandbox:
    """Replays recorded raw outcomes in order; used by golden bundles where
    the primary pipeline runs without the in-sandbox runner."""

    def __init__(self, outcomes: list[RawOutcome]):
        self.outcomes = list(outcomes)
        self.cursor = 0
        self.programs: list[str] = []

    def run(self, program_source: str, workdir: Path | None = None) -> RawOutcome:
        if self.cursor >= len(self.outcomes):
            raise SandboxUnavailable(
                f"stub sandbox exhausted after {len(self.outcomes)} executions"
            )
        self.programs.append(program_source)
        outcome = self.outcomes[self.cursor]
        self.cursor += 1
        return outcome


class RecordingSandbox:
    """Wraps any backend and keeps every raw outcome, so a live/record run
    can be frozen into a replayable bundle."""

    def __init__(self, inner):
        self.inner = inner
        self.outcomes: list[RawOutcome] = []

    @property
    def timeout(self):
        return getattr(self.inner, "timeout", None)

    def run(self, program_source: str, workdir: Path | None = None) -> RawOutcome:
        outcome = self.inner.run(program_source, workdir)
        self.outcomes.append(outcome)
        return outcome


def _decode(stream) -> str:
    if stream is None:
        return ""
    if isinstance(stream, bytes):
        return stream.decode("utf-8", errors="replace")
    return stream
