"""Distances on sparse binary vectors, and how the frequent-items summary
trades capacity for accuracy.

Run:  python3 demos/01_distances_and_sketches.py
Writes a figure to demos/out/sketch_error.png when matplotlib is available.
"""

from collections import Counter
from pathlib import Path

import numpy as np

from sofa import DistanceMetric, MGSketch, SparseBinaryVector, asym_hamming, hamming

# --- the asymmetric distance prefers dense centers -----------------------
dense_center = SparseBinaryVector([0, 1, 2, 3], 5)
sparse_center = SparseBinaryVector([4], 5)
point = SparseBinaryVector([0], 5)

print("plain Hamming distances:")
print("  dense center :", hamming(dense_center, point))
print("  sparse center:", hamming(sparse_center, point))

metric = DistanceMetric(0.1)
print("asymmetric (alpha=0.1) distances:")
print("  dense center :", asym_hamming(dense_center, point, metric))
print("  sparse center:", asym_hamming(sparse_center, point, metric))
print("-> symmetric Hamming would route the point to the sparse center;")
print("   the asymmetric distance routes it to the dense one.\n")

# --- sketch error decays like total_weight / (capacity + 1) --------------
rng = np.random.default_rng(1)
stream = rng.zipf(1.6, size=20_000) % 200
true_counts = Counter(stream.tolist())
total = len(stream)

print(f"zipf stream of {total} items over 200 distinct values")
print(f"{'capacity':>9} {'max error':>10} {'bound N/(c+1)':>14}")
rows = []
for capacity in (4, 8, 16, 32, 64, 128):
    sk = MGSketch(capacity)
    for item in stream.tolist():
        sk.insert(item)
    worst = max(true_counts[i] - sk.estimate(i) for i in range(200))
    bound = total / (capacity + 1)
    rows.append((capacity, worst, bound))
    print(f"{capacity:>9} {worst:>10.0f} {bound:>14.1f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(__file__).parent / "out"
    out.mkdir(exist_ok=True)
    caps, worsts, bounds = zip(*rows)
    plt.figure(figsize=(5, 3.5))
    plt.loglog(caps, worsts, "o-", label="measured max error")
    plt.loglog(caps, bounds, "s--", label="guarantee N/(capacity+1)")
    plt.xlabel("sketch capacity")
    plt.ylabel("frequency estimation error")
    plt.legend()
    plt.tight_layout()
    plt.savefig(out / "sketch_error.png", dpi=120)
    print(f"\nwrote {out / 'sketch_error.png'}")
except ImportError:
    print("\nmatplotlib not installed; skipping the figure")
