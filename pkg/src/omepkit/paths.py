from __future__ import annotations

import os
from pathlib import Path

ENV_OUTPUT_DIR = "OMEPKIT_OUTPUT_DIR"


def default_output_dir() -> Path:
    return Path.cwd()


def output_dir_source() -> tuple[Path, str]:
    """Directory that output files land in when --out is not given, and why."""
    env = os.environ.get(ENV_OUTPUT_DIR)
    if env:
        return Path(env).expanduser().resolve(), f"because {ENV_OUTPUT_DIR} is set"
    return default_output_dir().resolve(), "default: current directory"


def resolve_output_path(out_arg: str | None, default_name: str) -> Path:
    if out_arg:
        return Path(out_arg).expanduser().resolve()
    env = os.environ.get(ENV_OUTPUT_DIR)
    if env:
        return (Path(env).expanduser() / default_name).resolve()
    return (default_output_dir() / default_name).resolve()
