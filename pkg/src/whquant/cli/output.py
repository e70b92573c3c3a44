"""
Artifact writers: CSV tables, SVG plots and the run manifest.

Every file is written to a temporary sibling and moved into place with :func:`os.replace`,
so a failed run never leaves a truncated artifact behind.
"""

import io
import os
import tempfile
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402
from pydantic import BaseModel, Field  # noqa: E402

from whquant.cli.pipelines import PlotSpec  # noqa: E402
from whquant.const import WHQUANT_VERSION  # noqa: E402
from whquant.exceptions import OutputError  # noqa: E402

CSV_FLOAT_FORMAT = "%.16e"
"""17 significant digits, enough to round trip any double"""
SVG_HASHSALT = "whquant"
_TRACKED_PACKAGES = ("numpy", "scipy", "pydantic", "pandas", "matplotlib")


class Artifact(BaseModel):
    path: str
    size: int


class RunManifest(BaseModel):
    whquant_version: str = WHQUANT_VERSION
    command: str
    config_hash: str
    versions: dict[str, str] = Field(default_factory=dict)
    timings: dict[str, float] = Field(default_factory=dict)
    flags: list[str] = Field(default_factory=list)
    artifacts: list[Artifact] = Field(default_factory=list)


def package_versions() -> dict[str, str]:
    versions = {}
    for name in _TRACKED_PACKAGES:
        try:
            versions[name] = version(name)
        except PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def write_atomic(path: Path, data: bytes) -> Artifact:
    """Write ``data`` to ``path`` through a temporary file in the same directory"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return Artifact(path=str(path), size=len(data))


def emit_csv(table: pd.DataFrame, path: Path) -> Artifact:
    """
    Write a table with a single header row, ``.`` decimals, ``%.16e`` floats and LF endings.

    Raises:
        OutputError: for an empty table
    """
    if table.empty:
        raise OutputError(f"Refusing to write empty table to {path}")
    text = table.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return write_atomic(path, text.encode("utf-8"))


def emit_plot(plot: PlotSpec, path: Path) -> Artifact:
    """Render a line plot or heatmap as a standalone SVG without date metadata"""
    with plt.rc_context({"svg.hashsalt": SVG_HASHSALT, "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.8))
        try:
            if plot.kind == "line":
                for label, values in plot.series.items():
                    ax.plot(plot.x, values, label=label)
                if len(plot.series) > 1:
                    ax.legend()
            else:
                assert plot.y is not None and plot.z is not None
                mesh = ax.pcolormesh(plot.x, plot.y, plot.z.T, shading="nearest")
                fig.colorbar(mesh, ax=ax)
            ax.set_title(plot.title)
            ax.set_xlabel(plot.xlabel)
            ax.set_ylabel(plot.ylabel)
            buffer = io.BytesIO()
            fig.savefig(buffer, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return write_atomic(path, buffer.getvalue())


def emit_manifest(manifest: RunManifest, path: Path) -> Artifact:
    return write_atomic(path, manifest.model_dump_json(indent=2).encode("utf-8"))
