from __future__ import annotations

import os
import shutil
import subprocess

import pytest

from plift.bundle import Bundle, load_bundle, model_from_dict, _load_yaml
from plift.fixtures import bundle_paths, fixture_path


@pytest.fixture(scope="session")
def microlang() -> Bundle:
    return load_bundle(**bundle_paths("microlang"))


@pytest.fixture(scope="session")
def pen() -> Bundle:
    return load_bundle(**bundle_paths("pen"))


@pytest.fixture(scope="session")
def myprogram1(microlang):
    data = _load_yaml(fixture_path("microlang", "myprogram1.yaml"), "model")
    return model_from_dict(data, microlang.product_line.metamodel)


@pytest.fixture(scope="session")
def myprogram2(microlang):
    data = _load_yaml(fixture_path("microlang", "myprogram2.yaml"), "model")
    return model_from_dict(data, microlang.product_line.metamodel)


def z3_command() -> list[str] | None:
    """Command for the real-Z3 cross-check, or None when unavailable."""
    override = os.environ.get("PLIFT_Z3_CMD")
    if override:
        return override.split()
    node = shutil.which("node")
    if node is None:
        return None
    wrapper = fixture_path().parent.parent.parent / "tools" / "z3wasm.mjs"
    if not wrapper.exists():
        return None
    probe = subprocess.run(
        [node, str(wrapper)], input="(check-sat)", text=True,
        capture_output=True, timeout=120,
        env=_z3_env())
    if probe.returncode != 0 or "sat" not in probe.stdout:
        return None
    return [node, str(wrapper)]


def _z3_env() -> dict[str, str]:
    env = dict(os.environ)
    default_dir = "/opt/z3node/node_modules"
    if "NODE_PATH" not in env and os.path.isdir(default_dir):
        env["NODE_PATH"] = default_dir
    return env


@pytest.fixture(scope="session")
def z3_cmd():
    cmd = z3_command()
    if cmd is None:
        pytest.skip("no node/z3-solver available for cross-checking")
    os.environ.setdefault("NODE_PATH", "/opt/z3node/node_modules")
    return cmd
