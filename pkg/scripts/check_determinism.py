"""
Run every config in a directory twice and check that the CSV artifacts are byte-identical.
"""

import argparse
import sys
import tempfile
from pathlib import Path

from click.testing import CliRunner
from tqdm import tqdm

from whquant.cli.main import main as cli

CONFIG_DIR = Path(__file__).parents[1] / "configs"


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser()
    parser.add_argument("-d", "--directory", default=CONFIG_DIR, type=Path)
    return parser.parse_args()


def run_once(config: Path, output: Path) -> dict[str, bytes]:
    args = ["run", "--config", str(config), "--output", str(output), "-q"]
    result = CliRunner().invoke(cli, args)
    if result.exit_code != 0:
        raise RuntimeError(f"{config.name} exited with {result.exit_code}:\n{result.output}")
    return {p.name: p.read_bytes() for p in sorted(output.glob("*.csv"))}


def main() -> int:
    args = parse_args()
    configs = sorted(Path(args.directory).glob("*.toml"))
    failures = []
    with tempfile.TemporaryDirectory() as tmp:
        for config in tqdm(configs):
            first = run_once(config, Path(tmp) / config.stem / "a")
            second = run_once(config, Path(tmp) / config.stem / "b")
            if first != second:
                failures.append(config.name)
    for name in failures:
        print(f"CSV output differs between runs: {name}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
