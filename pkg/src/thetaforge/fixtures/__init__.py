"""Packaged example inputs: two-wall initial data and rank-2 seeds."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ..cluster import Seed
from ..lattice import QLattice, as_vec
from ..laurent import parse_laurent
from ..scattering import ScatDiagram

INITIAL = ("pentagon", "kronecker2", "kronecker3", "dense_example")
SEEDS = ("a2_seed", "kronecker2_seed")


def names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files(__name__).iterdir() if p.name.endswith(".json"))


def read(name_or_path: str | Path) -> dict:
    """Parse a packaged fixture by name, or any JSON file by path."""
    path = Path(name_or_path)
    if path.suffix == ".json" and path.exists():
        return json.loads(path.read_text())
    res = resources.files(__name__) / f"{name_or_path}.json"
    if not res.is_file():
        raise FileNotFoundError(f"no fixture or file named {name_or_path!r}")
    return json.loads(res.read_text())


def is_seed(data: dict) -> bool:
    return "B_numerators" in data


def initial_diagram(data: dict | str, k: int | None = None) -> ScatDiagram:
    if not isinstance(data, dict):
        data = read(data)
    if is_seed(data):
        raise ValueError("this file holds a seed, not initial walls")
    vs = [as_vec(item["v"]) for item in data["inputs"]]
    lat = QLattice.from_omega(data["omega"], data.get("sigma_gens", vs))
    inputs = [(v, parse_laurent(str(item.get("p", "1")))) for v, item in zip(vs, data["inputs"])]
    return ScatDiagram.from_inputs(lat, inputs, int(k if k is not None else data.get("order", 6)))


def seed(data: dict | str) -> Seed:
    if not isinstance(data, dict):
        data = read(data)
    if not is_seed(data):
        raise ValueError("this file holds initial walls, not a seed")
    return Seed.from_json(data)
