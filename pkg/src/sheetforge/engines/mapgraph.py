"""Border-graph questions about political maps.

A map is a set of countries, the pairs of countries sharing a land border and
the junction points where borders meet. Junctions shared by three or more
countries are "attractive points".
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
import sys
from typing import Any

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

import networkx as nx
import numpy as np
import pydantic
from geopy.distance import great_circle
from pydantic import BaseModel, Field

from sheetforge.utils.constants import EUROPE_DATASET
from sheetforge.utils.errors import (
    ColoringNotFoundError,
    DatasetError,
    NotEnoughPointsError,
    UnknownCountryError,
    ValidationError,
)
from sheetforge.utils.logger import get_logger
from sheetforge.utils.models import AnswerKey, Caption, Table, WorksheetDoc

logger = get_logger(__name__)

COLORS = (1, 2, 3, 4)


class CountryRecord(BaseModel):
    """One country as stored in a dataset file."""

    id: str = Field(..., min_length=1, description="Unique country key")
    name: str = Field(default="", description="Display name")
    lat: float = Field(..., ge=-90.0, le=90.0, description="Centroid latitude in degrees")
    lon: float = Field(..., ge=-180.0, le=180.0, description="Centroid longitude in degrees")


class JunctionRecord(BaseModel):
    """A point where the borders of several countries meet."""

    lat: float = Field(..., ge=-90.0, le=90.0)
    lon: float = Field(..., ge=-180.0, le=180.0)
    incident: list[str] = Field(..., min_length=2, description="Countries touching the point")


class DatasetRecord(BaseModel):
    """Dataset file layout."""

    name: str = ""
    notes: str = ""
    countries: list[CountryRecord] = Field(default_factory=list)
    borders: list[tuple[str, str]] = Field(default_factory=list)
    junctions: list[JunctionRecord] = Field(default_factory=list)


@dataclass(frozen=True)
class Country:
    """A country and its centroid (latitude, longitude)."""

    id: str
    name: str
    centroid: tuple[float, float]


@dataclass(frozen=True)
class Junction:
    """A border point and the countries incident to it."""

    point: tuple[float, float]
    incident: frozenset[str]

    @property
    def label(self) -> str:
        """Incident ids joined with '/', e.g. ``AD/ES/FR``."""
        return "/".join(sorted(self.incident))

    def to_dict(self) -> dict[str, Any]:
        """Convert to JSON-serializable dict."""
        return {"lat": self.point[0], "lon": self.point[1], "incident": sorted(self.incident)}


@dataclass(frozen=True)
class MapDataset:
    """Countries, unordered border pairs and junctions of one map.

    Construction does not validate; use ``validate`` or ``load_dataset``.
    """

    countries: tuple[Country, ...] = ()
    borders: frozenset[frozenset[str]] = field(default_factory=frozenset)
    junctions: tuple[Junction, ...] = ()
    name: str = ""

    @classmethod
    def build(
        cls,
        countries: list[tuple[str, str, float, float]] | list[str],
        borders: list[tuple[str, str]],
        junctions: list[tuple[tuple[float, float], list[str]]] | None = None,
        name: str = "",
    ) -> Self:
        """Create a dataset from plain tuples; bare ids get a (0, 0) centroid."""
        records = []
        for entry in countries:
            if isinstance(entry, str):
                records.append(Country(entry, entry, (0.0, 0.0)))
            else:
                cid, cname, lat, lon = entry
                records.append(Country(cid, cname, (lat, lon)))
        return cls(
            countries=tuple(records),
            borders=frozenset(frozenset(pair) for pair in borders),
            junctions=tuple(Junction(p, frozenset(ids)) for p, ids in junctions or []),
            name=name,
        )

    @cached_property
    def by_id(self) -> dict[str, Country]:
        """Countries keyed by id."""
        return {c.id: c for c in self.countries}

    @cached_property
    def graph(self) -> nx.Graph:
        """Border graph; every country is a node, isolated or not."""
        g = nx.Graph(name=self.name)
        g.add_nodes_from(c.id for c in self.countries)
        g.add_edges_from(tuple(pair) for pair in self.borders if len(pair) == 2)
        return g

    def require(self, country: str) -> Country:
        """Look a country up by id.

        Raises:
            UnknownCountryError: If the id is not in the dataset.

        """
        try:
            return self.by_id[country]
        except KeyError:
            raise UnknownCountryError(f"unknown country {country!r}") from None

    def to_dict(self) -> dict[str, Any]:
        """Convert to the dataset file layout."""
        return {
            "name": self.name,
            "countries": [
                {"id": c.id, "name": c.name, "lat": c.centroid[0], "lon": c.centroid[1]}
                for c in self.countries
            ],
            "borders": sorted(sorted(pair) for pair in self.borders),
            "junctions": [j.to_dict() for j in self.junctions],
        }


def validate(ds: MapDataset) -> list[str]:
    """Every consistency problem of ``ds``; empty when the dataset is sound."""
    problems: list[str] = []
    ids = [c.id for c in ds.countries]
    for cid in sorted({i for i in ids if ids.count(i) > 1}):
        problems.append(f"duplicate country id {cid!r}")
    for c in ds.countries:
        lat, lon = c.centroid
        if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
            problems.append(f"{c.id}: centroid ({lat}, {lon}) out of range")

    known = set(ids)
    for pair in sorted(sorted(p) for p in ds.borders):
        if len(pair) < 2:
            problems.append(f"border of {pair[0]!r} with itself")
        for cid in pair:
            if cid not in known:
                problems.append(f"border {'-'.join(pair)} names unknown country {cid!r}")

    for j in ds.junctions:
        if len(j.incident) < 2:
            problems.append(f"junction {j.label} touches fewer than 2 countries")
        for cid in sorted(j.incident - known):
            problems.append(f"junction {j.label} names unknown country {cid!r}")
        for a, b in itertools.combinations(sorted(j.incident), 2):
            if frozenset((a, b)) not in ds.borders:
                problems.append(f"junction {j.label}: {a} and {b} share no border")
    return problems


def _from_record(record: DatasetRecord) -> MapDataset:
    return MapDataset(
        countries=tuple(Country(c.id, c.name or c.id, (c.lat, c.lon)) for c in record.countries),
        borders=frozenset(frozenset(pair) for pair in record.borders),
        junctions=tuple(Junction((j.lat, j.lon), frozenset(j.incident)) for j in record.junctions),
        name=record.name,
    )


def read_dataset(path: Path | str) -> MapDataset:
    """Read a dataset file without checking its consistency.

    Raises:
        DatasetError: If the file is unreadable or does not match the file layout.

    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetError([f"{path}: {exc}"]) from exc
    try:
        record = DatasetRecord.model_validate(raw)
    except pydantic.ValidationError as exc:
        raise DatasetError(
            [f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in exc.errors()]
        ) from exc

    ds = _from_record(record)
    if not ds.name:
        ds = MapDataset(ds.countries, ds.borders, ds.junctions, name=path.stem)
    return ds


def load_dataset(path: Path | str) -> MapDataset:
    """Read a dataset file and reject it on any consistency problem.

    Raises:
        DatasetError: If the file is unreadable, malformed or inconsistent.

    """
    ds = read_dataset(path)
    problems = validate(ds)
    if problems:
        raise DatasetError(problems)
    logger.info(
        f"Loaded map {ds.name!r}: {len(ds.countries)} countries, "
        f"{len(ds.borders)} borders, {len(ds.junctions)} junctions"
    )
    return ds


def bundled_europe() -> MapDataset:
    """The frozen Europe map shipped with the package."""
    return load_dataset(EUROPE_DATASET)


def degree(ds: MapDataset, country: str) -> int:
    """Number of neighbours of ``country``."""
    ds.require(country)
    return int(ds.graph.degree[country])


def monogamous(ds: MapDataset) -> set[str]:
    """Countries with exactly one neighbour."""
    return {c for c, d in ds.graph.degree if d == 1}


def happy_monogamous(ds: MapDataset) -> set[frozenset[str]]:
    """Border pairs of two monogamous countries."""
    lonely = monogamous(ds)
    return {pair for pair in ds.borders if len(pair) == 2 and pair <= lonely}


def attractive_points(ds: MapDataset) -> list[Junction]:
    """Junctions touching at least three countries, in dataset order."""
    return [j for j in ds.junctions if len(j.incident) >= 3]


def check_theorem1(ds: MapDataset) -> list[tuple[str, Junction]]:
    """Monogamous countries listed on an attractive point.

    Always empty on a dataset that passes ``validate``.
    """
    lonely = monogamous(ds)
    return [
        (cid, j) for j in attractive_points(ds) for cid in sorted(j.incident) if cid in lonely
    ]


def countries_without_attractive_points(ds: MapDataset) -> set[str]:
    """Countries not incident to any attractive point."""
    touched = set().union(*(j.incident for j in attractive_points(ds)))
    return {c.id for c in ds.countries} - touched


def _is_clique(g: nx.Graph, nodes: list[str]) -> bool:
    return all(g.has_edge(a, b) for a, b in itertools.combinations(nodes, 2))


def friendly(ds: MapDataset) -> dict[str, int]:
    """Friendly countries and their rank.

    A country is friendly when it has at least two neighbours and every two
    of them are neighbours too; its rank is the number of neighbours.
    """
    g = ds.graph
    ranks = {}
    for cid in g.nodes:
        around = sorted(g.neighbors(cid))
        if len(around) >= 2 and _is_clique(g, around):
            ranks[cid] = len(around)
    return ranks


def friendly_by_rank(ds: MapDataset, rank: int) -> set[str]:
    """Friendly countries of the given rank."""
    return {cid for cid, r in friendly(ds).items() if r == rank}


def max_friendly_rank(ds: MapDataset) -> int:
    """Largest friendly rank, 0 when no country is friendly."""
    return max(friendly(ds).values(), default=0)


def tailed_partition(ds: MapDataset) -> tuple[set[str], set[str]]:
    """Split countries into (odd degree, even degree)."""
    tailed = {c for c, d in ds.graph.degree if d % 2 == 1}
    return tailed, set(ds.graph.nodes) - tailed


def nearest_attractive_points(
    ds: MapDataset, country: str, k: int = 1
) -> list[tuple[Junction, float]]:
    """The ``k`` attractive points closest to the centroid of ``country``.

    Returns (junction, great-circle km) pairs, nearest first; ties keep
    dataset order.

    Raises:
        UnknownCountryError: If the country is not in the dataset.
        NotEnoughPointsError: If the dataset has fewer than ``k`` attractive points.
        ValidationError: If ``k`` is not positive.

    """
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}")
    origin = ds.require(country).centroid
    points = attractive_points(ds)
    if len(points) < k:
        raise NotEnoughPointsError(f"asked for {k} attractive points, the map has {len(points)}")
    ranked = sorted(
        ((j, great_circle(origin, j.point).km) for j in points), key=lambda item: item[1]
    )
    return ranked[:k]


def four_color(ds: MapDataset) -> dict[str, int]:
    """Assign colors 1..4 so that neighbours differ.

    Countries are visited by decreasing degree, then id; each takes the
    smallest free color and the search backtracks on dead ends.

    Raises:
        ColoringNotFoundError: If no 4-coloring exists.

    """
    g = ds.graph
    order = sorted(g.nodes, key=lambda c: (-g.degree[c], c))
    coloring: dict[str, int] = {}
    nodes = 0

    def place(index: int) -> bool:
        nonlocal nodes
        nodes += 1
        if index == len(order):
            return True
        cid = order[index]
        taken = {coloring[n] for n in g.neighbors(cid) if n in coloring}
        for color in COLORS:
            if color in taken:
                continue
            coloring[cid] = color
            if place(index + 1):
                return True
            del coloring[cid]
        return False

    if not place(0):
        raise ColoringNotFoundError(f"map {ds.name!r} has no 4-coloring")
    logger.debug(f"Colored {len(order)} countries after {nodes} search nodes")
    return {cid: coloring[cid] for cid in sorted(coloring)}


def random_dataset(n: int, p: float, seed: int) -> MapDataset:
    """Random border graph with one junction per triangle.

    The result always passes ``validate``; it need not be planar.
    """
    if n < 0 or not 0.0 <= p <= 1.0:
        raise ValidationError(f"need n >= 0 and 0 <= p <= 1, got n={n}, p={p}")
    g = nx.gnp_random_graph(n, p, seed=seed)
    rng = np.random.default_rng(seed)
    lats = rng.uniform(-60.0, 60.0, size=n)
    lons = rng.uniform(-180.0, 180.0, size=n)
    names = {i: f"C{i}" for i in g.nodes}
    countries = tuple(
        Country(names[i], names[i], (round(float(lats[i]), 4), round(float(lons[i]), 4)))
        for i in g.nodes
    )
    junctions = []
    for a, b, c in itertools.combinations(sorted(g.nodes), 3):
        if g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c):
            centre = (
                round(float(np.mean(lats[[a, b, c]])), 4),
                round(float(np.mean(lons[[a, b, c]])), 4),
            )
            junctions.append(Junction(centre, frozenset(names[i] for i in (a, b, c))))
    return MapDataset(
        countries=countries,
        borders=frozenset(frozenset((names[a], names[b])) for a, b in g.edges),
        junctions=tuple(junctions),
        name=f"random-{n}-{p}-{seed}",
    )


def _names(ds: MapDataset, ids: set[str] | list[str]) -> str:
    return ", ".join(sorted(ds.by_id[c].name for c in ids)) or "none"


def map_worksheet(ds: MapDataset, country: str | None = None) -> WorksheetDoc:
    """Question sheet about ``ds`` with the answers below the cut line.

    When ``country`` is given, the sheet also asks for its nearest
    attractive points and whether it has any.
    """
    questions: list[tuple[str, str]] = [
        ("Which countries are monogamous?", _names(ds, monogamous(ds))),
        (
            "Which countries are happy monogamous?",
            _names(ds, set().union(*happy_monogamous(ds))),
        ),
        (
            "Which countries do not have attractive points?",
            _names(ds, countries_without_attractive_points(ds)),
        ),
        ("Find all rank 2 friendly countries.", _names(ds, friendly_by_rank(ds, 2))),
        ("What is the largest rank of a friendly country?", str(max_friendly_rank(ds))),
        ("Which countries are tailed?", _names(ds, tailed_partition(ds)[0])),
    ]
    if country is not None:
        name = ds.require(country).name
        own = [j.label for j in attractive_points(ds) if country in j.incident]
        questions.append((f"Has {name} any attractive points?", ", ".join(own) or "no"))
        available = min(2, len(attractive_points(ds)))
        if available:
            nearest = nearest_attractive_points(ds, country, available)
            questions.append(
                (
                    f"Which attractive points are the closest to {name}?",
                    ", ".join(f"{j.label} ({km:.0f} km)" for j, km in nearest),
                )
            )

    blocks = [Caption(f"{i}. {q}") for i, (q, _) in enumerate(questions, start=1)]
    blocks.append(
        Table(
            (("#", "answer"), *((str(i), a) for i, (_, a) in enumerate(questions, start=1))),
            header=True,
            name="answers",
        )
    )
    blocks.append(AnswerKey("answers"))
    logger.info(f"Generated map worksheet for {ds.name!r}")
    return WorksheetDoc(title=f"Map of {ds.name or 'the island'}", blocks=tuple(blocks))
