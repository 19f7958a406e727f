import io
import urllib.request

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltqp.bench.generator import (
    Message,
    Strategy,
    SyntheticConfig,
    fragment_messages,
    generate_environment,
    load_environment,
    write_environment,
)
from ltqp.bench.matrix import CSV_COLUMNS, run_matrix, write_arrivals, write_csv
from ltqp.bench.oracle import accuracy_f1, oracle_evaluate
from ltqp.bench.server import serve
from ltqp.bench.workload import TEMPLATES, make_case, workload
from ltqp.query import SolutionMapping, Variable, parse_query
from ltqp.rdf import LDP, PIM, RDF_TYPE, SOLID, Iri, Triple
from ltqp.turtle import parse_turtle

BASE = "http://localhost:3000/"


def cfg(**kw):
    defaults = dict(random_seed=1, persons=2, posts_per_person=1, comments_per_post=1, likes_per_person=1,
                    knows_per_person=1, strategy="single")
    return SyntheticConfig(**{**defaults, **kw})


def messages(specs):
    out = []
    for n, (day, location) in enumerate(specs):
        m = Message(n, "post", 0, day, location, f"post {n}")
        m.canonical = Iri(f"{BASE}canonical/post{n}")
        out.append(m)
    return out


def test_small_single_environment_has_ten_documents():
    env = generate_environment(cfg())
    assert len(env.documents) == 10
    for i in range(2):
        root = f"pods/p{i}/"
        assert {p for p in env.documents if p.startswith(root)} == {
            root, root + "card", root + "typeindex", root + "posts", root + "comments"}


def test_no_persons_no_documents():
    env = generate_environment(cfg(persons=0))
    assert env.documents == {} and env.union_graph == set()


def test_config_validation():
    with pytest.raises(ValueError):
        SyntheticConfig(persons=-1)
    with pytest.raises(ValueError):
        SyntheticConfig(multiplication_factor=0)
    with pytest.raises(ValueError):
        SyntheticConfig(base_url="not-a-url")
    with pytest.raises(ValueError):
        SyntheticConfig(strategy="random")


def test_generation_is_byte_deterministic():
    c = SyntheticConfig(random_seed=5, persons=8, noise_per_person=1)
    assert generate_environment(c).texts == generate_environment(c).texts
    assert generate_environment(c).texts != generate_environment(SyntheticConfig(random_seed=6, persons=8)).texts


def test_multiplication_factor_scales_posts():
    one = generate_environment(cfg(persons=3, strategy="separate"))
    three = generate_environment(cfg(persons=3, strategy="separate", multiplication_factor=3))
    count = lambda env: sum(1 for _, p, o in env.union_graph if p == RDF_TYPE and o.value.endswith("#Post"))
    assert count(three) == 3 * count(one)


def test_fragmentation_examples():
    three = messages([(0, "Ghent"), (1, "Ghent"), (2, "Brussels")])
    assert len(fragment_messages(three, Strategy.LOCATION, "pods/p0/", BASE).files) == 2
    assert len(fragment_messages(three, Strategy.SEPARATE, "pods/p0/", BASE).files) == 3
    assert len(fragment_messages(three, Strategy.TIME, "pods/p0/", BASE).files) == 3
    assert len(fragment_messages(three, Strategy.SINGLE, "pods/p0/", BASE).files) == 1
    assert fragment_messages([], Strategy.SEPARATE, "pods/p0/", BASE).files == {}


def test_fragmentation_rewrites_iris_into_their_file():
    frag = fragment_messages(messages([(0, "Ghent"), (3, "Leuven")]), Strategy.TIME, "pods/p0/", BASE)
    for path, triples in frag.files.items():
        assert {t.subject.value.split("#")[0] for t in triples} == {BASE + path}
    assert set(frag.iri_map) == {Iri(f"{BASE}canonical/post{n}") for n in range(2)}


def _crawl(env, start: Iri) -> set[str]:
    """Documents reachable from a WebID via pim:storage and ldp:contains only."""
    by_url = {env.url(p): d for p, d in env.documents.items()}
    card = by_url[start.value.split("#")[0]]
    frontier = [o.value for s, p, o in card.triples if s == start and p == Iri(PIM + "storage")]
    reached = {card.url.value}
    while frontier:
        url = frontier.pop()
        if url in reached or url not in by_url:
            continue
        reached.add(url)
        doc = by_url[url]
        frontier += [o.value for s, p, o in doc.triples if s == doc.url and p == Iri(LDP + "contains")]
    return reached


@pytest.mark.parametrize("strategy", [s.value for s in Strategy])
def test_every_document_reachable_through_vault_structure(strategy):
    env = generate_environment(SyntheticConfig(random_seed=2, persons=6, posts_per_person=3, noise_per_person=2,
                                               strategy=strategy))
    reached = set().union(*(_crawl(env, w) for w in env.webids))
    assert reached == {env.url(p) for p in env.documents}


@pytest.mark.parametrize("strategy", [s.value for s in Strategy])
def test_type_index_sound_and_complete(strategy):
    env = generate_environment(SyntheticConfig(random_seed=4, persons=5, posts_per_person=3, strategy=strategy))
    by_url = {env.url(p): d for p, d in env.documents.items()}
    for person in env.persons:
        index = by_url[person.root.value + "typeindex"]
        regs = {s for s, p, o in index.triples if p == RDF_TYPE and o == Iri(SOLID + "TypeRegistration")}
        for reg in regs:
            [cls] = [o for s, p, o in index.triples if s == reg and p == Iri(SOLID + "forClass")]
            docs = [o.value for s, p, o in index.triples if s == reg and p == Iri(SOLID + "instance")]
            for container in (o.value for s, p, o in index.triples if s == reg and p == Iri(SOLID + "instanceContainer")):
                docs += [o.value for s, p, o in by_url[container].triples if p == Iri(LDP + "contains")]
            registered = set()
            for url in docs:
                triples = by_url[url].triples
                subjects = {t.subject for t in triples}
                instances = {t.subject for t in triples if t.predicate == RDF_TYPE and t.object == cls}
                assert subjects == instances, url
                registered |= instances
            created = {s for s, p, o in env.union_graph
                       if p == RDF_TYPE and o == cls
                       and any(t.subject == s and t.predicate.value.endswith("hasCreator") and t.object == person.webid
                               for t in env.union_graph)}
            assert registered == created


def _canonical(results, env):
    back = {v: k for k, v in env.iri_map.items()}
    return {frozenset((k.name, back.get(v, v)) for k, v in mu.items()) for mu in results}


def test_strategies_preserve_messages_and_results():
    envs = {s: generate_environment(SyntheticConfig(random_seed=9, persons=6, posts_per_person=3, strategy=s))
            for s in Strategy}
    message_sets = set()
    for s, env in envs.items():
        back = {v: k for k, v in env.iri_map.items()}
        msgs = frozenset(Triple(back.get(a, a), p, back.get(b, b)) for a, p, b in env.union_graph
                         if isinstance(a, Iri) and a in back)
        message_sets.add(msgs)
    assert len(message_sets) == 1
    for name in TEMPLATES:
        outcomes = {frozenset(_canonical(oracle_evaluate(make_case(name, env, 1).query, env), env))
                    for env in envs.values()}
        assert len(outcomes) == 1, name


def test_write_and_load_round_trip(tmp_path):
    env = generate_environment(SyntheticConfig(random_seed=3, persons=4, strategy="separate"))
    write_environment(env, tmp_path)
    assert (tmp_path / "manifest.json").exists()
    assert (tmp_path / "pods" / "p0" / "index.ttl").exists()
    again = load_environment(tmp_path)
    assert again.texts == env.texts and again.union_graph == env.union_graph
    moved = load_environment(tmp_path, "http://127.0.0.1:9/")
    assert moved.persons[0].webid == Iri("http://127.0.0.1:9/pods/p0/card#me")


def test_rebase_moves_every_iri():
    env = generate_environment(cfg())
    moved = env.rebase("http://other:1")
    assert moved.base_url == "http://other:1/"
    assert not any(BASE in term.value for t in moved.union_graph for term in t if isinstance(term, Iri))
    assert len(moved.union_graph) == len(env.union_graph)


def test_server_serves_turtle_and_404():
    env = generate_environment(cfg())
    with serve(env) as srv:
        live = env.rebase(srv.base_url)
        url = live.persons[0].webid.value.split("#")[0]
        with urllib.request.urlopen(url) as response:
            assert response.status == 200
            assert response.headers["Content-Type"] == "text/turtle"
            doc = parse_turtle(response.read().decode(), url)
        assert any(p == Iri(PIM + "storage") for _, p, _ in doc.triples)
        with pytest.raises(urllib.error.HTTPError) as err:
            urllib.request.urlopen(srv.base_url + "nonexistent")
        assert err.value.code == 404
        head = urllib.request.Request(url, method="HEAD")
        assert urllib.request.urlopen(head).status == 200
        srv.set_failures({"pods/p0/card": 500})
        with pytest.raises(urllib.error.HTTPError):
            urllib.request.urlopen(url)


def test_oracle_examples():
    q = parse_query("SELECT ?s WHERE { ?s ?p ?o }")
    assert oracle_evaluate(q, set()) == set()
    t = Triple(Iri("http://a"), Iri("http://p"), Iri("http://b"))
    assert oracle_evaluate(q, {t}) == {SolutionMapping({Variable("s"): Iri("http://a")})}


def test_engine_matches_oracle_over_http():
    env = generate_environment(SyntheticConfig(random_seed=1, persons=5))
    with serve(env) as srv:
        live = env.rebase(srv.base_url)
        cells = run_matrix(live, [make_case("D1", live, 0)], ["cmatch"], ["ldp-idx-filt"])
    assert cells[0].accuracy == 100.0


def test_f1_examples():
    a, b = SolutionMapping({Variable("x"): Iri("http://a")}), SolutionMapping({Variable("x"): Iri("http://b")})
    assert accuracy_f1({a, b}, {a, b}) == 100.0
    assert accuracy_f1({a, b}, {a}) == pytest.approx(66.67, abs=0.005)
    assert accuracy_f1({a}, set()) == 0.0
    assert accuracy_f1(set(), set()) == 100.0


@settings(max_examples=1000)
@given(st.sets(st.integers(0, 9)), st.sets(st.integers(0, 9)))
def test_f1_bounded_and_symmetric(expected, actual):
    score = accuracy_f1(expected, actual)
    assert 0.0 <= score <= 100.0
    assert score == pytest.approx(accuracy_f1(actual, expected))
    assert (score == 100.0) == (expected == actual)


def test_matrix_cell_count_and_csv():
    env = generate_environment(SyntheticConfig(random_seed=2, persons=4))
    with serve(env) as srv:
        live = env.rebase(srv.base_url)
        cells = run_matrix(live, [make_case("D6", live, 0)], ["cnone", "cmatch"], ["base", "ldp-idx-filt"])
    assert len(cells) == 4
    text = write_csv(cells)
    header, *rows = text.strip().splitlines()
    assert tuple(header.split(",")) == CSV_COLUMNS and len(rows) == 4
    by_cell = {(c.reachability, c.discovery): c for c in cells}
    assert by_cell["cmatch", "ldp-idx-filt"].accuracy == 100.0
    assert by_cell["cnone", "ldp-idx-filt"].accuracy < 100.0
    for cell in cells:
        for run in cell.runs:
            assert 0 <= run.accuracy_f1 <= 100
            assert run.time_first_result_ms is None or run.time_first_result_ms <= run.exec_time_ms
    out = io.StringIO()
    write_arrivals(cells, out)
    assert len(out.getvalue().splitlines()) == 4


def test_matrix_records_failures_instead_of_aborting():
    env = generate_environment(SyntheticConfig(random_seed=2, persons=2))
    case = make_case("D1", env, 0)

    class Exploding:
        def get(self, *args):
            raise RuntimeError("transport down")

    cells = run_matrix(env, [case], ["cmatch"], ["base"], transport=Exploding())
    assert len(cells) == 1 and cells[0].runs[0].accuracy_f1 == 0.0 and cells[0].runs[0].error


def test_workload_flags():
    env = generate_environment(cfg())
    cases = workload(env)
    assert [c.name for c in cases] == list(TEMPLATES)
    assert {c.name for c in cases if c.spanning} == {"D5", "D6", "D7", "D8"}
    assert {c.name for c in cases if c.typed} == {"D1", "D4"}
