from __future__ import annotations

import json
import os
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import numpy as np

from schauder_ldp.core.ciesielski import DyadicPath
from schauder_ldp.main import run
from schauder_ldp.utils.io_utils import load_path_csv, save_path_csv


def main() -> None:
    with tempfile.TemporaryDirectory(prefix="schauder-ldp-debug-") as td:
        root = Path(td)
        log_path = root / "run_log.json"
        log_path.write_text("[]", encoding="utf-8")

        center = root / "center.csv"
        save_path_csv(DyadicPath.from_function(lambda t: np.stack([t, t * t], axis=1), 6), center)

        config = root / "config.json"
        config.write_text(
            json.dumps({"spectrum": {"kind": "geometric", "lambda0": 0.5, "ratio": 0.5}, "K": 2, "J": 6, "M": 2000}),
            encoding="utf-8",
        )
        common = ["--config", str(config), "--log", str(log_path)]

        coeffs = root / "coeffs.csv"
        back = root / "back.csv"
        steps = [
            ["transform", "forward", "--in", str(center), "--out", str(coeffs)],
            ["transform", "inverse", "--in", str(coeffs), "--out", str(back)],
            ["rate", "--in", str(center), "--out", str(root / "rate.json")],
            ["ball-inf", "--center", str(center), "--delta", "0.1", "--out", str(root / "ball.json")],
            [
                "ldp-curve", "--center", str(center), "--delta", "0.1", "--eps", "2^-2..2^-8",
                "--mc-upto", "2^-3", "--out", str(root / "curve.json"),
            ],
            ["tightness", "--eps", "0.25,0.125", "--out", str(root / "tight.json")],
        ]
        for argv in steps:
            code = run(common + argv)
            if code != 0:
                raise RuntimeError(f"{' '.join(argv[:2])} exited with {code}")

        error = np.max(np.abs(load_path_csv(back).samples - load_path_csv(center).samples))
        if error > 1e-12:
            raise RuntimeError(f"inverse(forward(center)) is off by {error}")

        curve = json.loads((root / "curve.json").read_text(encoding="utf-8"))
        if len(curve.get("points") or []) != 7:
            raise RuntimeError(f"unexpected curve: {curve}")

        entries = json.loads(log_path.read_text(encoding="utf-8"))
        runs = [e for e in entries if e.get("action_type") == "run"]
        if len(runs) != len(steps) or any(e.get("status") != "completed" for e in runs):
            raise RuntimeError("expected one completed run record per step")

        print("DEEP_DEBUG_OK")
        print(f"workdir={root}")
        print(f"target={curve['target']}")
        print(f"final_eps_logp={curve['points'][-1]['eps_logp']}")
        print(f"log_entries={len(entries)}")


if __name__ == "__main__":
    os.environ.setdefault("PYTHONUTF8", "1")
    main()
