from __future__ import annotations

import subprocess
import sys
from pathlib import Path


def _python() -> str:
    # Use the same interpreter running the tests
    return sys.executable


def _root() -> str:
    return str(Path(__file__).resolve().parent.parent)


def test_module_entrypoint_help():
    """Running `python -m edgeSampler --help` should exit 0 and list the subcommands."""
    proc = subprocess.run(
        [_python(), "-m", "edgeSampler", "--help"], capture_output=True, text=True, timeout=30, cwd=_root()
    )
    assert proc.returncode == 0
    out = proc.stdout + proc.stderr
    assert "usage" in out.lower()
    for command in ("gen", "layering", "sample", "analyze", "verify", "bench", "estimate-m"):
        assert command in out


def test_module_entrypoint_bad_arguments():
    """argparse rejects a missing subcommand with exit code 2."""
    proc = subprocess.run([_python(), "-m", "edgeSampler"], capture_output=True, text=True, timeout=30, cwd=_root())
    assert proc.returncode == 2


def test_module_entrypoint_sample(tmp_path: Path):
    """End to end through the module: one sampled edge of a path."""
    graph = tmp_path / "path.txt"
    graph.write_text("0 1\n1 2\n2 3\n")
    proc = subprocess.run(
        [_python(), "-m", "edgeSampler", "--log-level", "WARNING", "sample", str(graph), "--alpha", "1", "--eps", ".5"],
        capture_output=True,
        text=True,
        timeout=60,
        cwd=_root(),
    )
    assert proc.returncode == 0
    u, v, _, _ = proc.stdout.split()
    assert abs(int(u) - int(v)) == 1
