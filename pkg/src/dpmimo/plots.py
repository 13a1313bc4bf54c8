"""Figure rendering for experiment row sets.

Each campaign gets one figure saved next to its CSV. Only aggregate or
per-UE rows are consumed; flagged failure rows are ignored.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_COMBO_STYLE = {
    ("dual", "MR"): dict(color="C0", linestyle="-", marker="o"),
    ("dual", "ZF"): dict(color="C1", linestyle="-", marker="s"),
    ("uni", "MR"): dict(color="C0", linestyle="--", marker="^"),
    ("uni", "ZF"): dict(color="C1", linestyle="--", marker="v"),
}


def _ok(row):
    return not row.method.startswith("failed:")


def _xpd_label(xpd_db):
    if np.isinf(xpd_db):
        return "no leakage"
    return f"XPD {xpd_db:g} dB"


def plot_m_sweep(rows, path):
    """Average sum SE versus number of BS ports, four combinations."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for (setup, prec), style in _COMBO_STYLE.items():
        points = sorted(
            (r.m, r.se)
            for r in rows
            if _ok(r) and r.drop_index == -1 and r.setup == setup
            and r.precoder == prec
        )
        if not points:
            continue
        x, y = zip(*points)
        ax.plot(x, y, label=f"{setup} {prec}", **style)
    ax.set_xlabel("BS polarization ports M")
    ax.set_ylabel("average sum SE (bit/s/Hz)")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_cdf(rows, path):
    """Empirical CDF of per-UE SE for each setup/precoder pair."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for (setup, prec), style in _COMBO_STYLE.items():
        values = np.sort(
            [
                r.se
                for r in rows
                if _ok(r) and r.ue_index >= 0 and r.setup == setup
                and r.precoder == prec
            ]
        )
        if values.size == 0:
            continue
        cdf = np.arange(1, values.size + 1) / values.size
        style = dict(style)
        style.pop("marker", None)
        ax.plot(values, cdf, label=f"{setup} {prec}", **style)
    ax.set_xlabel("SE per UE (bit/s/Hz)")
    ax.set_ylabel("CDF")
    ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.4)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_xpd_sweep(rows, path):
    """Average sum SE versus ports for each XPD value, MR and ZF."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    agg = [r for r in rows if _ok(r) and r.drop_index == -1]
    xpds = sorted({r.xpd_db for r in agg}, reverse=True)
    for i, xpd in enumerate(xpds):
        for prec, ls in (("MR", "-"), ("ZF", "--")):
            points = sorted(
                (r.m, r.se)
                for r in agg
                if r.xpd_db == xpd and r.precoder == prec
            )
            if not points:
                continue
            x, y = zip(*points)
            ax.plot(
                x, y, color=f"C{i}", linestyle=ls, marker="o",
                label=f"{_xpd_label(xpd)} {prec}",
            )
    ax.set_xlabel("BS polarization ports M")
    ax.set_ylabel("average sum SE (bit/s/Hz)")
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
