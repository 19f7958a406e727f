"""Deterministic social-network environments laid out as Solid-style vaults.

Every person gets a vault at ``pods/p<i>/`` holding a WebID profile
(``card``), a public type index, message files fragmented by the person's
strategy, and optional noise documents, all listed by the root container.
Comments live in the commenter's vault and point across vaults to the post
they reply to; likes (blank nodes in the profile) point to messages in
other vaults.

Documents are written with host-relative IRIs, so the same bytes can be
served from any origin; :meth:`GeneratedEnvironment.rebase` reparses them
for a different one.
"""
from __future__ import annotations

import enum
import json
import random
from dataclasses import asdict, dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, Mapping
from urllib.parse import urlsplit

from ..rdf import (
    LDP,
    PIM,
    RDF_TYPE,
    SOLID,
    XSD,
    XSD_INTEGER,
    BlankNode,
    Iri,
    Literal,
    ParsedDocument,
    Triple,
    is_absolute,
)
from ..turtle import parse_turtle, serialize_turtle


class Strategy(str, enum.Enum):
    SEPARATE = "separate"
    SINGLE = "single"
    LOCATION = "location"
    TIME = "time"
    COMPOSITE = "composite"


BASIC_STRATEGIES = (Strategy.SEPARATE, Strategy.SINGLE, Strategy.LOCATION, Strategy.TIME)

LOCATIONS = ("Ghent", "Brussels", "Antwerp", "Leuven", "Bruges")
TAGS = ("music", "travel", "science", "sports", "food", "movies", "books")
FIRST_NAMES = ("Zulma", "Ada", "Bart", "Chen", "Dirk", "Elif", "Femke", "Goran", "Hana", "Ines",
               "Joris", "Kofi", "Lien", "Mira", "Noor", "Omar", "Pia", "Quinn", "Rik", "Sara")
START_DATE = date(2012, 5, 1)


@dataclass(frozen=True)
class SyntheticConfig:
    random_seed: int = 0
    persons: int = 10
    posts_per_person: int = 2
    comments_per_post: int = 1
    likes_per_person: int = 1
    knows_per_person: int = 2
    multiplication_factor: int = 1
    strategy: Strategy = Strategy.COMPOSITE
    base_url: str = "http://localhost:3000/"
    noise_per_person: int = 0
    days: int = 14

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        for name in ("persons", "posts_per_person", "comments_per_post", "likes_per_person",
                     "knows_per_person", "noise_per_person"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.multiplication_factor < 1:
            raise ValueError("multiplication_factor must be >= 1")
        if self.days < 1:
            raise ValueError("days must be >= 1")
        if not is_absolute(self.base_url) or not self.base_url.endswith("/"):
            raise ValueError("base_url must be an absolute IRI ending in '/'")


@dataclass
class Message:
    number: int
    kind: str  # "post" | "comment"
    creator: int
    day: int
    location: str
    content: str
    tag: str | None = None
    reply_of: "Message | None" = None
    canonical: Iri = None  # type: ignore[assignment]

    @property
    def date(self) -> str:
        return (START_DATE + timedelta(days=self.day)).isoformat()


@dataclass(frozen=True)
class PersonInfo:
    index: int
    name: str
    webid: Iri
    root: Iri
    strategy: Strategy


@dataclass
class Fragmentation:
    files: dict[str, list[Triple]]
    iri_map: dict[Iri, Iri]
    containers: list[str] = field(default_factory=list)


@dataclass
class GeneratedEnvironment:
    config: SyntheticConfig
    base_url: str
    texts: dict[str, str]
    documents: dict[str, ParsedDocument]
    persons: list[PersonInfo]
    iri_map: dict[Iri, Iri]

    @property
    def vocabulary(self) -> str:
        return vocabulary_namespace(self.base_url)

    @property
    def webids(self) -> list[Iri]:
        return [p.webid for p in self.persons]

    @property
    def vault_roots(self) -> list[Iri]:
        return [p.root for p in self.persons]

    @property
    def union_graph(self) -> set[Triple]:
        return {t for doc in self.documents.values() for t in doc.triples}

    def url(self, path: str) -> str:
        return self.base_url + path

    def rebase(self, base_url: str) -> "GeneratedEnvironment":
        """The same documents as seen from another origin."""
        if not base_url.endswith("/"):
            base_url += "/"
        old = self.base_url

        def move(iri: Iri) -> Iri:
            return Iri(base_url + iri.value[len(old):]) if iri.value.startswith(old) else iri

        return GeneratedEnvironment(
            config=self.config,
            base_url=base_url,
            texts=dict(self.texts),
            documents={p: parse_turtle(t, base_url + p) for p, t in self.texts.items()},
            persons=[PersonInfo(p.index, p.name, move(p.webid), move(p.root), p.strategy) for p in self.persons],
            iri_map={move(k): move(v) for k, v in self.iri_map.items()},
        )


def vocabulary_namespace(base_url: str) -> str:
    return base_url + "vocabulary#"


def _origin(base_url: str) -> str:
    parts = urlsplit(base_url)
    return f"{parts.scheme}://{parts.netloc}/"


def _file_key(message: Message, strategy: Strategy) -> str:
    if strategy is Strategy.SEPARATE:
        return f"{message.kind}s/{message.kind}{message.number}"
    if strategy is Strategy.SINGLE:
        return f"{message.kind}s"
    if strategy is Strategy.LOCATION:
        return f"{message.kind}s-{message.location.lower()}"
    if strategy is Strategy.TIME:
        return f"{message.kind}s-{message.date}"
    raise ValueError(f"strategy {strategy} must be resolved per person first")


def message_triples(message: Message, vocab: str, webid_of) -> list[Triple]:
    """Canonical (pre-fragmentation) triples describing one message."""
    v = lambda name: Iri(vocab + name)  # noqa: E731
    m = message.canonical
    out = [
        Triple(m, RDF_TYPE, v("Post" if message.kind == "post" else "Comment")),
        Triple(m, v("id"), Literal(str(message.number), XSD_INTEGER)),
        Triple(m, v("hasCreator"), webid_of(message.creator)),
        Triple(m, v("content"), Literal(message.content)),
        Triple(m, v("creationDate"), Literal(message.date, Iri(XSD + "date"))),
        Triple(m, v("locatedIn"), Literal(message.location)),
    ]
    if message.tag is not None:
        out.append(Triple(m, v("hasTag"), Literal(message.tag)))
    if message.reply_of is not None:
        out.append(Triple(m, v("replyOf"), message.reply_of.canonical))
    return out


def rewrite(triples: Iterable[Triple], iri_map: Mapping[Iri, Iri]) -> list[Triple]:
    return [Triple(iri_map.get(s, s), p, iri_map.get(o, o)) for s, p, o in triples]


def fragment_messages(
    messages: Iterable[Message],
    strategy: Strategy,
    container: str,
    base_url: str,
    vocab: str | None = None,
    webid_of=None,
) -> Fragmentation:
    """Assign messages to files under ``container`` and rewrite their IRIs.

    Each message's triples go to the file of its subject. The message IRI is
    rewritten to ``<file>#<kind><number>``; references between messages of
    this batch are rewritten too, references to other messages are left for
    the caller's global rewrite.
    """
    vocab = vocab or vocabulary_namespace(base_url)
    webid_of = webid_of or (lambda i: Iri(f"{base_url}pods/p{i}/card#me"))
    messages = list(messages)
    iri_map: dict[Iri, Iri] = {}
    grouped: dict[str, list[Message]] = {}
    for message in messages:
        path = container + _file_key(message, strategy)
        grouped.setdefault(path, []).append(message)
        iri_map[message.canonical] = Iri(f"{base_url}{path}#{message.kind}{message.number}")
    files = {
        path: rewrite((t for m in group for t in message_triples(m, vocab, webid_of)), iri_map)
        for path, group in grouped.items()
    }
    containers = sorted({container + key.split("/")[0] + "/" for key in
                         (_file_key(m, strategy) for m in messages) if "/" in key})
    return Fragmentation(files, iri_map, containers)


class _Builder:
    def __init__(self, cfg: SyntheticConfig):
        self.cfg = cfg
        self.base = cfg.base_url
        self.vocab = vocabulary_namespace(cfg.base_url)
        self.rng = random.Random(cfg.random_seed)

    def v(self, name: str) -> Iri:
        return Iri(self.vocab + name)

    def webid(self, i: int) -> Iri:
        return Iri(f"{self.base}pods/p{i}/card#me")

    def pod(self, i: int) -> str:
        return f"pods/p{i}/"

    def build(self) -> GeneratedEnvironment:
        cfg, rng = self.cfg, self.rng
        n = cfg.persons
        names = [f"{FIRST_NAMES[i % len(FIRST_NAMES)]}{i}" for i in range(n)]
        offsets = [rng.randrange(len(LOCATIONS)) for _ in range(n)]
        knows = []
        for i in range(n):
            others = [j for j in range(n) if j != i]
            knows.append(sorted(rng.sample(others, min(cfg.knows_per_person, len(others)))))

        counter = 0
        posts: list[Message] = []
        comments: list[Message] = []
        for i in range(n):
            for _ in range(cfg.posts_per_person * cfg.multiplication_factor):
                day = rng.randrange(cfg.days)
                tag = rng.choice(TAGS)
                posts.append(Message(counter, "post", i, day, LOCATIONS[(day + offsets[i]) % len(LOCATIONS)],
                                     f"{names[i]} writes about {tag} ({counter})", tag=tag))
                counter += 1
        for post in posts:
            others = [j for j in range(n) if j != post.creator] or [post.creator]
            for _ in range(cfg.comments_per_post):
                who = rng.choice(others)
                day = min(cfg.days - 1, post.day + rng.randrange(3))
                comments.append(Message(counter, "comment", who, day, LOCATIONS[(day + offsets[who]) % len(LOCATIONS)],
                                        f"{names[who]} replies to {post.number} ({counter})", reply_of=post))
                counter += 1
        for m in posts + comments:
            m.canonical = Iri(f"{self.base}canonical/{m.kind}{m.number}")

        likes: list[list[Message]] = []
        messages = posts + comments
        for i in range(n):
            candidates = [m for m in messages if m.creator != i]
            likes.append(rng.sample(candidates, min(cfg.likes_per_person, len(candidates))))

        choice = random.Random(f"composite:{cfg.random_seed}")
        strategies = []
        for i in range(n):
            picked = choice.choice(BASIC_STRATEGIES)
            strategies.append(picked if cfg.strategy is Strategy.COMPOSITE else cfg.strategy)

        # Fragment per person, then rewrite cross-vault references globally.
        fragments: dict[int, list[Fragmentation]] = {}
        iri_map: dict[Iri, Iri] = {}
        for i in range(n):
            own = []
            for group in ([m for m in posts if m.creator == i], [m for m in comments if m.creator == i]):
                if group:
                    frag = fragment_messages(group, strategies[i], self.pod(i), self.base, self.vocab, self.webid)
                    own.append(frag)
                    iri_map.update(frag.iri_map)
            fragments[i] = own

        graphs: dict[str, list[Triple]] = {}
        persons = []
        for i in range(n):
            pod = self.pod(i)
            contained: list[str] = ["card", "typeindex"]
            graphs[pod + "card"] = self.profile(i, names[i], knows[i], likes[i], iri_map)
            registrations = []
            for frag in fragments[i]:
                kind = next(iter(frag.files.values()))[0].object  # rdf:type of the first message
                for path, triples in frag.files.items():
                    graphs[path] = rewrite(triples, iri_map)
                if frag.containers:
                    for c in frag.containers:
                        members = sorted(p[len(c):] for p in frag.files if p.startswith(c))
                        graphs[c] = self.container(c, members)
                        contained.append(c[len(pod):])
                    registrations.append((kind, "container", frag.containers))
                else:
                    contained.extend(sorted(p[len(pod):] for p in frag.files))
                    registrations.append((kind, "instance", sorted(frag.files)))
            graphs[pod + "typeindex"] = self.type_index(pod + "typeindex", registrations)
            for j in range(cfg.noise_per_person):
                graphs[pod + f"noise{j}"] = self.noise(pod + f"noise{j}", i, j)
                contained.append(f"noise{j}")
            graphs[pod] = self.container(pod, contained)
            persons.append(PersonInfo(i, names[i], self.webid(i), Iri(self.base + pod), strategies[i]))

        prefixes = {"ldp": LDP, "pim": PIM, "solid": SOLID, "xsd": XSD, "snvoc": self.vocab}
        root = _origin(self.base)
        texts = {path: serialize_turtle(graphs[path], prefixes, root) for path in sorted(graphs)}
        documents = {path: parse_turtle(text, self.base + path) for path, text in texts.items()}
        return GeneratedEnvironment(cfg, self.base, texts, documents, persons, iri_map)

    def profile(self, i, name, knows, likes, iri_map) -> list[Triple]:
        me = self.webid(i)
        doc = self.base + self.pod(i) + "card"
        out = [
            Triple(me, RDF_TYPE, self.v("Person")),
            Triple(me, self.v("id"), Literal(str(i), XSD_INTEGER)),
            Triple(me, self.v("firstName"), Literal(name)),
            Triple(me, Iri(PIM + "storage"), Iri(self.base + self.pod(i))),
            Triple(me, Iri(SOLID + "publicTypeIndex"), Iri(self.base + self.pod(i) + "typeindex")),
        ]
        out += [Triple(me, self.v("knows"), self.webid(j)) for j in knows]
        for k, message in enumerate(likes):
            like = BlankNode(f"like{k}", doc)
            out.append(Triple(me, self.v("likes"), like))
            predicate = "hasPost" if message.kind == "post" else "hasComment"
            out.append(Triple(like, self.v(predicate), iri_map[message.canonical]))
            out.append(Triple(like, self.v("creationDate"), Literal(message.date, Iri(XSD + "date"))))
        return out

    def container(self, path: str, members: list[str]) -> list[Triple]:
        me = Iri(self.base + path)
        out = [Triple(me, RDF_TYPE, Iri(LDP + c)) for c in ("Container", "BasicContainer", "Resource")]
        out += [Triple(me, Iri(LDP + "contains"), Iri(self.base + path + m)) for m in members]
        return out

    def type_index(self, path: str, registrations) -> list[Triple]:
        me = Iri(self.base + path)
        out = [Triple(me, RDF_TYPE, Iri(SOLID + "TypeIndex")), Triple(me, RDF_TYPE, Iri(SOLID + "ListedDocument"))]
        for cls, how, targets in registrations:
            reg = Iri(f"{self.base}{path}#{cls.value.rsplit('#', 1)[-1].lower()}s")
            out.append(Triple(reg, RDF_TYPE, Iri(SOLID + "TypeRegistration")))
            out.append(Triple(reg, Iri(SOLID + "forClass"), cls))
            predicate = Iri(SOLID + ("instanceContainer" if how == "container" else "instance"))
            out += [Triple(reg, predicate, Iri(self.base + t)) for t in targets]
        return out

    def noise(self, path: str, i: int, j: int) -> list[Triple]:
        me = Iri(f"{self.base}{path}#setting")
        return [
            Triple(me, RDF_TYPE, self.v("Setting")),
            Triple(me, self.v("preference"), Literal(f"theme-{(i + j) % 3}")),
            Triple(me, self.v("revision"), Literal(str(j), XSD_INTEGER)),
        ]


def generate_environment(cfg: SyntheticConfig) -> GeneratedEnvironment:
    return _Builder(cfg).build()


# -- on-disk layout --------------------------------------------------------


def _file_name(path: str) -> str:
    return (path + "index.ttl") if path.endswith("/") or not path else path + ".ttl"


def write_environment(env: GeneratedEnvironment, outdir: str | Path) -> Path:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = {}
    for path, text in env.texts.items():
        name = _file_name(path)
        target = outdir / name
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        files[path] = name
    base = env.base_url
    config = asdict(env.config)
    config["strategy"] = env.config.strategy.value
    manifest = {
        "base_url": base,
        "config": config,
        "documents": files,
        "persons": [
            {"name": p.name, "webid": p.webid.value[len(base):], "root": p.root.value[len(base):],
             "strategy": p.strategy.value}
            for p in env.persons
        ],
        "iri_map": {k.value[len(base):]: v.value[len(base):] for k, v in sorted(env.iri_map.items(), key=lambda kv: kv[0].value)},
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return outdir / "manifest.json"


def load_environment(outdir: str | Path, base_url: str | None = None) -> GeneratedEnvironment:
    outdir = Path(outdir)
    manifest = json.loads((outdir / "manifest.json").read_text(encoding="utf-8"))
    base = base_url or manifest["base_url"]
    if not base.endswith("/"):
        base += "/"
    config = SyntheticConfig(**{**manifest["config"], "base_url": manifest["config"]["base_url"]})
    texts = {path: (outdir / name).read_text(encoding="utf-8") for path, name in manifest["documents"].items()}
    persons = [
        PersonInfo(i, p["name"], Iri(base + p["webid"]), Iri(base + p["root"]), Strategy(p["strategy"]))
        for i, p in enumerate(manifest["persons"])
    ]
    iri_map = {Iri(base + k): Iri(base + v) for k, v in manifest["iri_map"].items()}
    documents = {path: parse_turtle(text, base + path) for path, text in texts.items()}
    return GeneratedEnvironment(config, base, texts, documents, persons, iri_map)
