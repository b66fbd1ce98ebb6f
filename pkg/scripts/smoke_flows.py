"""
Smoke test for the end-to-end flow (simulate -> eval) through the CLI entry point.
Writes into a temporary directory; no real score files required.
"""

import json
import tempfile
from pathlib import Path

from spoofair.main import main


def run_smoke():
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        sim = root / "sim"
        assert main(["-q", "simulate", "--scenario", "biased", "--n-per-cell", "2000", "--systems", "2", "--out-dir", str(sim)]) == 0
        assert (sim / "run.toml").exists()

        reports = root / "reports"
        assert main(["-q", "eval", "--config", str(sim / "run.toml"), "--out-dir", str(reports)]) == 0
        document = json.loads((reports / "report.json").read_text(encoding="utf-8"))
        assert document["bundle"]["systems"] == ["sys1", "sys2"]
        sp = document["display"]["fairness"]["SP"]
        assert all(row["p_holm"].endswith("*") for row in sp.values()), sp

        assert main(["-q", "check", "--protocol", str(sim / "protocol_eval.txt")]) == 0
        print("Smoke OK: simulate, eval and check")


if __name__ == "__main__":
    run_smoke()
