"""Generation / translation backends.

A generation backend is any callable ``backend(prompt_tokens, index) -> tokens``.
``index`` is the prompt index; builtin backends derive their per-request random
stream from ``(seed, index)`` so results do not depend on call order.

A translation backend is any callable ``backend(tokens) -> tokens``.

``SubprocessBackend`` serves both roles over a line protocol: one line of
space-joined tokens to the child's stdin, one line back from its stdout.
"""
from __future__ import annotations

import shlex
import subprocess
import threading
from typing import Sequence

from .ngram_lm import NGramModel, sample_continuation


class BackendError(RuntimeError):
    pass


class NGramBackend:
    """Builtin generator: samples continuations from an n-gram model."""

    may_truncate = True

    def __init__(self, model: NGramModel, max_new: int = 128, temperature: float = 1.0, seed: int = 0):
        self.model = model
        self.max_new = max_new
        self.temperature = temperature
        self.seed = seed

    def __call__(self, prompt: Sequence[str], index: int = 0) -> list:
        return sample_continuation(
            self.model, prompt, self.max_new, self.temperature, rng_seed=(self.seed, index)
        )


class SubprocessBackend:
    """Line-oriented external process.

    Usable as a generation backend (``index`` is ignored and not sent) and as a
    translation backend. Requests are serialized with a lock, so the child sees
    them in call order. An empty response line is a valid empty result; the
    child closing stdout before answering raises :class:`BackendError`.
    """

    # a child answers with whole lines, so no token budget cuts the tail
    may_truncate = False

    def __init__(self, command: str | Sequence[str]):
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.argv:
            raise ValueError("empty backend command")
        self._proc = None
        self._lock = threading.Lock()

    def _ensure_started(self):
        if self._proc is None:
            try:
                self._proc = subprocess.Popen(
                    self.argv,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    encoding="utf-8",
                    bufsize=1,
                )
            except OSError as e:
                raise BackendError(f"cannot start backend {self.argv!r}: {e}") from e
        return self._proc

    def __call__(self, tokens: Sequence[str], index: int | None = None) -> list:
        with self._lock:
            proc = self._ensure_started()
            try:
                proc.stdin.write(" ".join(tokens) + "\n")
                proc.stdin.flush()
            except (BrokenPipeError, OSError) as e:
                raise BackendError(f"backend exited before request: {e}") from e
            line = proc.stdout.readline()
            if not line:
                raise BackendError(f"backend exited before responding (code {proc.poll()})")
            return line.split()

    def close(self):
        proc, self._proc = self._proc, None
        if proc is None:
            return
        try:
            proc.stdin.close()
        except OSError:
            pass
        try:
            proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()
        proc.stdout.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass


def parse_backend_spec(spec: str):
    """``"builtin"`` -> None; ``"external:CMD"`` -> the command string."""
    if spec == "builtin":
        return None
    if spec.startswith("external:") and spec[len("external:"):].strip():
        return spec[len("external:"):].strip()
    raise ValueError(f"backend must be 'builtin' or 'external:CMD', got {spec!r}")
