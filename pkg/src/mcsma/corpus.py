"""Bundled network corpora.

``corpus/`` holds the standard test graphs with brute-force expected values.
``corpus_figures/`` holds candidate reconstructions of networks that are only
described pictorially, with the values they are meant to reproduce.
"""
from __future__ import annotations

import json
from pathlib import Path

from .conflict_graph import MultiChannelNetwork, network_from_dict

_HERE = Path(__file__).resolve().parent


def corpus_dir() -> Path:
    return _HERE / "corpus"


def figures_dir() -> Path:
    return _HERE / "corpus_figures"


def load_instance(path: str | Path) -> tuple[MultiChannelNetwork, dict]:
    """Network plus its ``expected`` block (empty if absent)."""
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    net = network_from_dict(data, name=data.get("name", path.stem))
    return net, data.get("expected", {})


def instances(root: str | Path | None = None) -> dict[str, tuple[MultiChannelNetwork, dict]]:
    root = corpus_dir() if root is None else Path(root)
    return {p.stem: load_instance(p) for p in sorted(root.glob("*.json"))}


def graph(name: str, num_channels: int = 1, nu: float | None = None) -> MultiChannelNetwork:
    """A shipped corpus graph with ``num_channels`` channels."""
    net, _ = load_instance(corpus_dir() / f"{name}.json")
    net = net.with_channels(num_channels)
    return net if nu is None else net.with_nu(nu)
