#!/usr/bin/env python3
# Brute-force reference for the three-row worked example (reward, p_target, p_logging).
import sys

rows = [(1.0, 0.8, 0.6), (0.5, 0.7, 0.5), (1.5, 0.9, 0.7)]

weights = [pt / p0 for _, pt, p0 in rows]
terms = [r * w for (r, _, _), w in zip(rows, weights)]

ips = sum(terms) / len(rows)
snips = sum(terms) / sum(weights)
blend = (ips + snips + 0.5 + 1.1) / 4.0

print(f"ips={ips:.4f} snips={snips:.4f} blend={blend:.4f}")

expected = {"ips": "1.3206", "snips": "0.9858"}
ok = f"{ips:.4f}" == expected["ips"] and f"{snips:.4f}" == expected["snips"]
if len(sys.argv) > 1 and sys.argv[1] == "--check":
    sys.exit(0 if ok else 1)
