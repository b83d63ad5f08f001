"""Plot a scaling.csv produced by ``qradar scaling`` (example only; needs matplotlib).

    qradar scaling --config docs/example_scaling.yaml --out run
    python3 docs/plot_scaling.py run/scaling.csv scaling.png
"""

import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def main(csv_path, png_path):
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    fig, ax = plt.subplots(figsize=(5, 4))
    for mode, marker in (("entangled", "o"), ("independent", "s"), ("coherent_equivalent", "^")):
        sel = [r for r in rows if r["mode"] == mode]
        if not sel:
            continue
        n = [int(r["N"]) for r in sel]
        ax.loglog(n, [float(r["empirical_sigma_s"]) for r in sel], marker, label=f"{mode} (Monte Carlo)")
        ax.loglog(n, [float(r["predicted_sigma_s"]) for r in sel], "k:", lw=1)
    ax.set_xlabel("photons per probe N")
    ax.set_ylabel("mean arrival time spread (s)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)


if __name__ == "__main__":
    main(*sys.argv[1:3])
