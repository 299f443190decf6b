"""Shipped example bundles: the micro-language program family and the pen
manufacturing case study (plus its seeded-fault presence tables)."""

from __future__ import annotations

from pathlib import Path

_ROOT = Path(__file__).parent


def fixture_path(*parts: str) -> Path:
    path = _ROOT.joinpath(*parts)
    if not path.exists():
        raise FileNotFoundError(f"no such fixture: {'/'.join(parts)}")
    return path


def bundle_paths(name: str, presence: str = "presence.yaml") -> dict[str, Path]:
    """Keyword arguments for bundle.load_bundle, by fixture directory."""
    base = fixture_path(name)
    return {
        "metamodel": base / "metamodel.yaml",
        "model": base / "model.yaml",
        "features": base / "features.yaml",
        "presence": base / presence,
        "constraints": base / "constraints.yaml",
    }
