import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgbench.alignment import Correspondence
from kgbench.gold import (
    CrowdTask,
    FileRedirectResolver,
    GoldStandard,
    InterwikiLink,
    WikiPage,
    aggregate_crowd,
    close_triangles,
    crowd_matches,
    enforce_functional_injective,
    extract_link_candidates,
    group_links,
    iri_for_page,
    load_gold,
    read_page_dump,
    resolve_redirects,
    save_gold,
    split_sections,
)

from conftest import DATA

FIXTURE = DATA / "wiki" / "pages.jsonl"
CROSSCHECK = Path(__file__).parent.parent / "scripts" / "crosscheck_gold_fixture.py"


def page(title, sections, wiki="alpha"):
    return WikiPage(wiki=wiki, title=title, sections=sections)


def link(src, tgt, header="External links"):
    return InterwikiLink(("alpha", src), ("beta", tgt), header)


# -- wikitext scanning ------------------------------------------------------

def test_split_sections():
    text = "lead text\n== Career ==\nbody one\n=== Links ===\nbody two\n"
    assert split_sections(text) == [
        ("", "lead text"),
        ("Career", "body one"),
        ("Links", "body two"),
    ]


def test_link_section_header_rule():
    pages = [
        page("A", [("External links", "* [[beta:One]]")]),
        page("B", [("Biography", "* [[beta:Two]]")]),
        page("C", [("Links", "[[beta:Three]]")]),
        page("D", [("External Links", "[[beta:Four]]")]),
        page("E", [("Weblinks", "[[beta:Five]]")]),
    ]
    extraction = extract_link_candidates(pages, {"beta"})
    assert {l.target[1] for l in extraction.links} == {"One", "Three", "Four", "Five"}


def test_links_need_known_wiki_prefix():
    pages = [page("A", [("Links", "[[Local Page]] [[gamma:Other]] [[beta:Good|shown]]")])]
    extraction = extract_link_candidates(pages, {"beta"})
    assert [l.target for l in extraction.links] == [("beta", "Good")]


def test_self_wiki_links_ignored():
    pages = [page("A", [("Links", "[[alpha:Self]] [[beta:Other]]")])]
    extraction = extract_link_candidates(pages, {"alpha", "beta"})
    assert [l.target for l in extraction.links] == [("beta", "Other")]


def test_unparseable_token_counted():
    pages = [page("A", [("Links", "[[beta:Fine]] and then [[beta:Broken")])]
    extraction = extract_link_candidates(pages, {"beta"})
    assert [l.target[1] for l in extraction.links] == ["Fine"]
    assert extraction.unparseable == {("alpha", "A"): 1}


def test_redirect_pages_yield_no_candidates():
    pages = [WikiPage("alpha", "R", redirect_to="Somewhere")]
    assert extract_link_candidates(pages, {"beta"}).links == []


# -- redirect resolution ----------------------------------------------------

def test_redirect_chain_followed():
    resolver = FileRedirectResolver({"beta": {"Catarina": "Kathryn Janeway"}})
    resolution = resolve_redirects([link("A", "Catarina")], resolver)
    assert resolution.links[0].target == ("beta", "Kathryn Janeway")
    assert resolution.dropped == []


def test_redirect_identity_when_unmapped():
    resolution = resolve_redirects([link("A", "Plain")], FileRedirectResolver())
    assert resolution.links[0].target == ("beta", "Plain")


def test_redirect_cycle_dropped():
    resolver = FileRedirectResolver({"beta": {"a": "b", "b": "a"}})
    resolution = resolve_redirects([link("A", "a")], resolver)
    assert resolution.links == []
    assert "cycle" in resolution.dropped[0][1]


def test_redirect_depth_limit():
    chain = {f"t{i}": f"t{i+1}" for i in range(30)}
    resolver = FileRedirectResolver({"beta": chain})
    resolution = resolve_redirects([link("A", "t0")], resolver)
    assert resolution.links == []
    assert "depth" in resolution.dropped[0][1]
    deep = resolve_redirects([link("A", "t0")], resolver, max_depth=40)
    assert deep.links[0].target == ("beta", "t30")


def test_redirect_resolver_from_tsv(tmp_path):
    path = tmp_path / "beta.tsv"
    path.write_text("Old_Name\tNew Name\n# comment\n", encoding="utf-8")
    resolver = FileRedirectResolver.from_tsv({"beta": path})
    assert resolver.resolve("beta", "Old Name") == "New Name"


# -- functional / injective filtering ---------------------------------------

def test_functional_violation_removes_all():
    gold = enforce_functional_injective([link("a", "x"), link("a", "y")])
    assert gold.positives == set() and gold.one_to_one


def test_single_link_survives():
    gold = enforce_functional_injective([link("a", "x")])
    assert gold.pairs() == {(iri_for_page("alpha", "a"), iri_for_page("beta", "x"))}


def test_injectivity_removes_shared_targets():
    gold = enforce_functional_injective([link("a", "x"), link("b", "x"), link("c", "y")])
    assert gold.pairs() == {(iri_for_page("alpha", "c"), iri_for_page("beta", "y"))}


def test_duplicate_links_are_one_pair():
    gold = enforce_functional_injective([link("a", "x"), link("a", "x", header="Links")])
    assert len(gold.positives) == 1


@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), max_size=40))
def test_filter_output_strictly_one_to_one(pairs):
    links = [link(f"s{a}", f"t{b}") for a, b in pairs]
    gold = enforce_functional_injective(links)
    sources = [c.source for c in gold.positives]
    targets = [c.target for c in gold.positives]
    assert len(sources) == len(set(sources))
    assert len(targets) == len(set(targets))
    gold.check_one_to_one()


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=25), st.randoms())
def test_filter_order_independent(pairs, rng):
    links = [link(f"s{a}", f"t{b}") for a, b in pairs]
    shuffled = list(links)
    rng.shuffle(shuffled)
    assert enforce_functional_injective(links).pairs() == enforce_functional_injective(shuffled).pairs()


def test_mixed_wiki_pairs_rejected():
    links = [link("a", "x"), InterwikiLink(("alpha", "b"), ("gamma", "y"), "Links")]
    with pytest.raises(ValueError, match="wiki pairs"):
        enforce_functional_injective(links)


# -- the 12-page fixture ----------------------------------------------------

EXPECTED_GOLD = {
    (iri_for_page("alpha", "Alice"), iri_for_page("beta", "Alice")),
    (iri_for_page("alpha", "Bob"), iri_for_page("beta", "Bobby")),
    (iri_for_page("alpha", "Janeway"), iri_for_page("beta", "Kathryn Janeway")),
}


def run_fixture_pipeline():
    pages = list(read_page_dump(FIXTURE))
    assert len(pages) == 12
    extraction = extract_link_candidates(pages, {"beta"})
    resolution = resolve_redirects(extraction.links, FileRedirectResolver.from_pages(pages))
    groups = group_links(resolution.links)
    return extraction, resolution, enforce_functional_injective(groups[("alpha", "beta")])


def test_wiki_fixture_yields_exactly_three_pairs():
    extraction, resolution, gold = run_fixture_pipeline()
    assert extraction.unparseable == {}
    assert len(extraction.links) == 8
    assert len(resolution.dropped) == 1  # the Loop One <-> Loop Two cycle
    assert gold.pairs() == EXPECTED_GOLD


def test_wiki_fixture_crosscheck_script_agrees():
    out = subprocess.run(
        [sys.executable, str(CROSSCHECK), str(FIXTURE), "alpha", "beta"],
        capture_output=True,
        text=True,
        check=True,
    )
    pairs = {tuple(line.split("\t")) for line in out.stdout.splitlines() if line}
    assert pairs == EXPECTED_GOLD


# -- crowd aggregation ------------------------------------------------------

E = "http://kg.example.org/beta/resource/E"


def test_majority_positive():
    task = CrowdTask("http://x/s", "beta", [E, E, E, None, None])
    gold = aggregate_crowd([task])
    assert gold.pairs() == {("http://x/s", E)}
    assert gold.negatives == set()
    assert gold.one_to_one is False


def test_majority_negative():
    task = CrowdTask("http://x/s", "beta", [None, None, None, E, E + "2"])
    gold = aggregate_crowd([task])
    assert gold.positives == set()
    assert gold.negatives == {("http://x/s", "beta")}


def test_no_majority_yields_nothing():
    task = CrowdTask("http://x/s", "beta", [E, E, E + "2", E + "2", None])
    gold = aggregate_crowd([task])
    assert gold.positives == set() and gold.negatives == set()


def test_wrong_response_count_rejected():
    with pytest.raises(ValueError, match="5 responses"):
        aggregate_crowd([CrowdTask("http://x/s", "beta", [E, E, E])])


def test_conflicting_tasks_rejected():
    tasks = [
        CrowdTask("http://x/s", "beta", [E, E, E, None, None]),
        CrowdTask("http://x/s", "beta", [None, None, None, E, E]),
    ]
    with pytest.raises(ValueError, match="conflicting"):
        aggregate_crowd(tasks)


verdict_pool = st.sampled_from([None, E, E + "2", E + "3"])


@given(st.lists(st.lists(verdict_pool, min_size=5, max_size=5), max_size=12))
def test_crowd_never_emits_positive_and_negative_for_same_key(responses):
    tasks = [CrowdTask(f"http://x/s{i}", "beta", r) for i, r in enumerate(responses)]
    gold = aggregate_crowd(tasks)
    positive_keys = {(c.source, "beta") for c in gold.positives}
    assert positive_keys.isdisjoint(gold.negatives)


# -- triangle closure -------------------------------------------------------

def test_triangle_closure_basic():
    matches = [("http://x/s", "w1", "http://w1/e1"), ("http://x/s", "w2", "http://w2/e2")]
    derived = close_triangles(matches)
    assert derived == {("w1", "w2"): {Correspondence("http://w1/e1", "http://w2/e2")}}


def test_triangle_closure_single_target_adds_nothing():
    assert close_triangles([("http://x/s", "w1", "http://w1/e1")]) == {}


def test_triangle_closure_set_semantics():
    matches = [
        ("http://x/s1", "w1", "http://w1/e1"),
        ("http://x/s1", "w2", "http://w2/e2"),
        ("http://x/s2", "w1", "http://w1/e1"),
        ("http://x/s2", "w2", "http://w2/e2"),
    ]
    derived = close_triangles(matches)
    assert len(derived[("w1", "w2")]) == 1


def test_triangle_closure_never_touches_source_wiki():
    tasks = [
        CrowdTask("http://x/s", "w1", ["http://w1/e1"] * 5),
        CrowdTask("http://x/s", "w2", ["http://w2/e2"] * 5),
    ]
    derived = close_triangles(crowd_matches(tasks))
    for (w1, w2), cells in derived.items():
        assert "x" not in (w1, w2)
        for c in cells:
            assert c.source.startswith(f"http://{w1}/")
            assert c.target.startswith(f"http://{w2}/")


# -- persistence ------------------------------------------------------------

def test_save_load_gold_roundtrip(tmp_path):
    gold = GoldStandard(
        positives={Correspondence("http://x/a", "http://y/b")},
        negatives={("http://x/n", "y")},
        one_to_one=False,
    )
    pos, neg = tmp_path / "gold.tsv", tmp_path / "negatives.tsv"
    save_gold(gold, pos, neg)
    back = load_gold(pos, neg)
    assert back.pairs() == gold.pairs()
    assert back.negatives == gold.negatives


def test_check_one_to_one_rejects_repeats():
    gold = GoldStandard(
        positives={
            Correspondence("http://x/a", "http://y/b"),
            Correspondence("http://x/a", "http://y/c"),
        },
        one_to_one=True,
    )
    with pytest.raises(ValueError, match="not 1:1"):
        gold.check_one_to_one()
