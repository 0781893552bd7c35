#!/usr/bin/env python3
"""
faultiso Experiment Launcher
This script runs one of the built-in isolation experiments end to end.

    python run_experiment.py                 # scenario1, single run
    python run_experiment.py scenario2 --montecarlo
"""

import argparse
import os
import subprocess
import sys
from pathlib import Path


def check_python_version():
    """Check if Python version is compatible"""
    if sys.version_info < (3, 9):
        print("Error: Python 3.9 or higher is required")
        sys.exit(1)


def check_requirements():
    """Check that the numerical stack is importable"""
    missing = []
    for module in ("numpy", "scipy", "pandas", "pydantic", "yaml"):
        try:
            __import__(module)
        except ImportError:
            missing.append(module)
    if missing:
        print(f"Error: missing packages {missing}. Run 'pip install -r requirements.txt'")
        sys.exit(1)


def create_results_directory(out: str) -> Path:
    """Create results directory if it doesn't exist"""
    results_dir = Path(out)
    results_dir.mkdir(parents=True, exist_ok=True)
    print(f"Results directory ready: {results_dir.absolute()}")
    return results_dir


def run_experiment(config: str, results_dir: Path, montecarlo: bool, trials=None) -> int:
    """Run the experiment through the faultiso CLI"""
    verb = "montecarlo" if montecarlo else "run"
    command = [sys.executable, "-m", "faultiso", verb, "--config", config, "--out", str(results_dir)]
    if montecarlo and trials is not None:
        command += ["--trials", str(trials)]

    print(f"Running '{verb}' with config '{config}'...")
    print("Press Ctrl+C to stop")
    print("-" * 50)

    try:
        return subprocess.run(command).returncode
    except KeyboardInterrupt:
        print("\nExperiment interrupted")
        return 130


def main():
    """Main launcher function"""
    parser = argparse.ArgumentParser(description="Run a faultiso experiment")
    parser.add_argument("config", nargs="?", default="scenario1")
    parser.add_argument("--montecarlo", action="store_true")
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    print("faultiso - Experiment Launcher")
    print("=" * 50)

    check_python_version()

    project_dir = Path(__file__).parent
    os.chdir(project_dir)
    print(f"Working directory: {project_dir.absolute()}")

    check_requirements()

    results_dir = create_results_directory(args.out or f"results/{Path(args.config).stem}")
    code = run_experiment(args.config, results_dir, args.montecarlo, args.trials)

    print("-" * 50)
    if code == 0:
        print(f"Done. Artifacts written to {results_dir.absolute()}")
    else:
        print(f"Experiment failed with exit code {code}")
    sys.exit(code)


if __name__ == "__main__":
    main()
