"""Optional PNG figures for the CLI; needs matplotlib (``pip install artifact[plot]``)."""

from __future__ import annotations

from pathlib import Path

__all__ = ["plot_trajectory", "plot_spectrum"]


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise OSError("figures need matplotlib; install the 'plot' extra") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_trajectory(rows, columns, path: Path, title: str = "") -> Path:
    """``delta_f`` and its closed form, plus the worst residual, against ``u``."""
    plt = _pyplot()
    col = {name: i for i, name in enumerate(columns)}
    u = [r[col["u"]] for r in rows]
    fig, (ax, ax_res) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
    ax.plot(u, [r[col["delta_f"]] for r in rows], label="RK4")
    ax.plot(u, [r[col["closed_form_f"]] for r in rows], "--", label="closed form")
    ax.set_ylabel("delta_f")
    ax.legend()
    ax.set_title(title)
    ax_res.semilogy(u, [max(abs(r[col["max_residual"]]), 1e-18) for r in rows])
    ax_res.set_xlabel("u")
    ax_res.set_ylabel("max residual")
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_spectrum(rows, columns, path: Path) -> Path:
    """``k_l r0 / lambda`` against ``l`` with its ``-1/2`` asymptote."""
    plt = _pyplot()
    col = {name: i for i, name in enumerate(columns)}
    pts = [(r[col["l"]], r[col["k_over_lambda"]]) for r in rows if r[col["l"]] >= 2]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-", label="k_l r0 / lambda")
    ax.axhline(-0.5, color="gray", ls=":", label="-1/2")
    ax.set_xlabel("l")
    ax.legend()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
