#!/usr/bin/env python3
"""Build a complete exploration session for the 27-architecture toy space.

Writes space.json, distances.axdm, tree.json, views.json and search traces
into the target directory, then prints how to serve it.
"""
import argparse
import json
from pathlib import Path

from archspace.cli import main as cli_main
from archspace.spaces import save_space, toy27_space


def run(session_dir: Path) -> None:
    session_dir.mkdir(parents=True, exist_ok=True)
    space = session_dir / "space.json"
    save_space(toy27_space(), space)
    steps = [
        ["distances", "--space", space, "--sample", 27, "--seed", 0,
         "--out", session_dir / "distances.axdm"],
        ["cluster", "--space", space, "--dist", session_dir / "distances.axdm",
         "--out", session_dir / "tree.json", "--min-cluster", 8, "--max-depth", 2,
         "--k-max", 3, "--surrogate", 0],
        ["layout", "--space", space, "--dist", session_dir / "distances.axdm",
         "--tree", session_dir / "tree.json", "--out", session_dir / "views.json",
         "--budget", 30, "--surrogate", 0],
        ["search", "--space", space, "--surrogate", 0, "--strategy", "random",
         "--budget", 20, "--seeds", "0,1,2", "--out-dir", session_dir / "traces"],
    ]
    for step in steps:
        code = cli_main([str(s) for s in step])
        if code != 0:
            raise SystemExit(code)
    print(json.dumps({"event": "session_ready", "dir": str(session_dir)}))
    print(f"serve it with: archspace serve --port 8765 --session-dir {session_dir}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--session-dir", default="toy-session", type=Path)
    args = parser.parse_args()
    run(args.session_dir)
