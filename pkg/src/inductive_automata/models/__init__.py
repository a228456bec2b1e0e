"""Example models shipped with the package, one directory per model."""

from pathlib import Path
from typing import List

MODELS_ROOT = Path(__file__).parent


def model_names() -> List[str]:
    return sorted(path.name for path in MODELS_ROOT.iterdir() if path.is_dir() and not path.name.startswith(("_", ".")))


def model_path(name: str) -> Path:
    path = MODELS_ROOT / name
    if not path.is_dir():
        raise KeyError(f"no bundled model named {name!r}")
    return path
