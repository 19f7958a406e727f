"""Discover-style query templates over the generated social vocabulary."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from ..query import Query, instantiate, parse_query
from ..rdf import Iri
from .generator import GeneratedEnvironment

# name -> (description, typed subjects only, crosses vault boundaries)
TEMPLATES = {
    "D1": ("posts of a person", True, False),
    "D2": ("messages of a person", False, False),
    "D3": ("tags of a person's messages", False, False),
    "D4": ("locations of a person's comments", True, False),
    "D5": ("authors a person replied to", False, True),
    "D6": ("names of known people", False, True),
    "D7": ("contents of liked messages", False, True),
    "D8": ("other messages by creators of liked messages", False, True),
}


def template_text(name: str) -> str:
    return resources.files(__package__).joinpath("queries", f"{name.lower()}.rq").read_text(encoding="utf-8")


@dataclass(frozen=True)
class QueryCase:
    name: str
    person: Iri
    text: str
    typed: bool
    spanning: bool

    @property
    def query(self) -> Query:
        return parse_query(self.text)

    @property
    def label(self) -> str:
        return f"{self.name}@{self.person.value}"


def make_case(name: str, env: GeneratedEnvironment, person: int = 0) -> QueryCase:
    _, typed, spanning = TEMPLATES[name]
    webid = env.persons[person].webid
    text = instantiate(template_text(name), vocabulary=env.vocabulary, person=webid.n3())
    return QueryCase(name, webid, text, typed, spanning)


def workload(env: GeneratedEnvironment, names=None, persons=(0,)) -> list[QueryCase]:
    names = list(names or TEMPLATES)
    return [make_case(n, env, p) for p in persons if p < len(env.persons) for n in names]
