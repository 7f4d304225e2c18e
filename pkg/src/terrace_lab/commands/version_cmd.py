"""Version command for terrace-lab."""

import importlib.metadata
import platform
from pathlib import Path

from .._kernels import HAS_NUMBA
from ..ui import console, key_value_panel, show_banner


def _package_version(name: str) -> str:
    try:
        return importlib.metadata.version(name)
    except importlib.metadata.PackageNotFoundError:
        return "not installed"


def _cli_version() -> str:
    try:
        return importlib.metadata.version("terrace-lab")
    except importlib.metadata.PackageNotFoundError:
        # Running from a source checkout
        import tomllib

        pyproject_path = Path(__file__).parent.parent.parent.parent / "pyproject.toml"
        if pyproject_path.exists():
            with open(pyproject_path, "rb") as f:
                return tomllib.load(f).get("project", {}).get("version", "unknown")
        return "unknown"


def version():
    """Display version and system information."""
    show_banner()
    rows = [
        ("terrace-lab", _cli_version()),
        ("", ""),
        ("numpy", _package_version("numpy")),
        ("scipy", _package_version("scipy")),
        (
            "numba",
            _package_version("numba") if HAS_NUMBA else "not available (numpy kernel)",
        ),
        ("", ""),
        ("Python", platform.python_version()),
        ("Platform", platform.system()),
        ("Architecture", platform.machine()),
    ]
    console.print(key_value_panel("Terrace Lab Information", rows))
    console.print()
