"""Writes tests/fixtures/aggregation_60.json.

Sixty synthetic per-video scores (20 per mode) with an authored gate
pattern, plus the expected report rows computed here with math.fsum so the
C++ aggregation is checked against an independent summation.
"""

import json
import math
import random
import sys
from pathlib import Path

MODES = [("reactive", "Reactive", 7), ("explicit_proactive", "Explicit", 12),
         ("implicit_proactive", "Implicit", 16)]
WEIGHTS = (0.4, 0.08, 0.25, 0.20, 0.07)


def make_score(rng, mode, index, valid):
    s_h, s_t, s_lat, s_sc, s_obs = (rng.random() for _ in range(5))
    over_alert = rng.random() < 0.15
    s = sum(w * c for w, c in zip(WEIGHTS, (s_h, s_t, s_lat, s_sc, s_obs))) - (0.25 if over_alert else 0.0)
    alignment = rng.uniform(0.5, 1.0) if valid else rng.uniform(0.0, 0.4999)
    return {
        "video_id": f"video-{mode}-{index:02d}",
        "mode": mode,
        "alignment_score": alignment,
        "gate_status": "valid" if valid else "excluded",
        "gate_reason": None if valid else "alignment_below_threshold",
        "s_h": s_h, "s_t": s_t, "s_lat": s_lat, "e_lat": 1.0 - s_lat,
        "s_sc": s_sc, "s_obs": s_obs, "over_alert": over_alert,
        "delta_t_s": rng.uniform(-4.0, 12.0), "s": s, "benign": False,
    }


def row(label, scores):
    valid = [x for x in scores if x["gate_status"] == "valid"]
    n = len(valid)

    def mean(key):
        return math.fsum(x[key] for x in valid) / n if n else None

    overall = mean("s")
    return {
        "mode_label": label, "total": len(scores), "valid": n, "excluded": len(scores) - n,
        "overall": None if overall is None else 100.0 * overall,
        "helpfulness": mean("s_h"), "tone": mean("s_t"),
        "latency_err": mean("e_lat"), "safety_crit": mean("s_sc"),
    }


def main(out_path):
    rng = random.Random(20260115)
    scores, rows = [], []
    for mode, label, n_valid in MODES:
        pattern = [True] * n_valid + [False] * (20 - n_valid)
        rng.shuffle(pattern)
        mode_scores = [make_score(rng, mode, i, v) for i, v in enumerate(pattern)]
        scores.extend(mode_scores)
        rows.append(row(label, mode_scores))
    rows.append(row("All Modes", scores))
    Path(out_path).write_text(json.dumps({"scores": scores, "expected_rows": rows}, indent=1) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/aggregation_60.json")
