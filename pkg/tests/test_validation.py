import random

import pytest

from generators import EX_NS, random_dag
from oracles import connected_components, reachability_pairs
from xkg.rdf import (
    D0_NS,
    DUL_ASSOCIATED_WITH,
    DUL_NS,
    DUL_PRECEDES,
    FRED_NS,
    OWL_CLASS,
    PBLR_NS,
    PBRS_NS,
    RDFS_COMMENT,
    RDFS_LABEL,
    RDFS_SUBCLASSOF,
    RDF_TYPE,
    TRUE,
    WN30_NS,
    Iri,
    Literal,
    RdfGraph,
    Triple,
    parse_turtle,
)
from xkg.validation import (
    ANCHOR_FLOAT,
    DISJOINT_CLASH,
    ERROR,
    FALLBACK_ROLE,
    INFO,
    MISSING_COMMENT,
    PREFIX_MISUSE,
    PRECEDES_CYCLE,
    UNDECLARED_PREFIX,
    WARN,
    Diagnostic,
    MiniOntology,
    check_anchoring,
    check_consistency,
    infer_precedence,
    lint,
    profile,
)


def fred(local):
    return Iri(FRED_NS + local)


def ex(local):
    return Iri(EX_NS + local)


BASE = RdfGraph.of([
    Triple(fred("athlete_1"), RDF_TYPE, fred("Athlete")),
    Triple(fred("win_1"), RDF_TYPE, Iri(PBRS_NS + "win-01")),
    Triple(fred("celebrate_1"), Iri(PBLR_NS + "celebrate-01.honorer"), fred("athlete_1")),
])


class TestAnchoring:
    def test_anchored_addition_passes(self):
        added = {Triple(fred("athlete_1"), Iri("https://w3id.org/xkg/impact#hasExpectedEmotion"),
                        Iri("https://w3id.org/xkg/impact#Joy"))}
        assert check_anchoring(BASE, added) == []

    def test_floating_component_reported(self):
        added = {Triple(ex("a"), ex("p"), ex("b"))}
        diagnostics = check_anchoring(BASE, added)
        assert [d.code for d in diagnostics] == [ANCHOR_FLOAT]
        assert diagnostics[0].severity == ERROR

    def test_chain_through_fresh_nodes_is_anchored(self):
        added = {
            Triple(fred("win_1"), ex("p"), ex("n1")),
            Triple(ex("n1"), ex("q"), ex("n2")),
        }
        assert check_anchoring(BASE, added) == []

    def test_empty_additions(self):
        assert check_anchoring(BASE, set()) == []

    def test_insensitive_to_order(self):
        added = [
            Triple(ex("a"), ex("p"), ex("b")),
            Triple(fred("win_1"), ex("p"), ex("n1")),
            Triple(ex("b"), ex("q"), ex("c")),
        ]
        forward = check_anchoring(BASE, added)
        backward = check_anchoring(BASE, list(reversed(added)))
        assert [d.code for d in forward] == [d.code for d in backward] == [ANCHOR_FLOAT]

    def test_fifty_random_addition_sets_match_component_oracle(self):
        rng = random.Random(1234)
        base_nodes = [fred("athlete_1"), fred("win_1"), fred("celebrate_1"), fred("Athlete")]
        for _ in range(50):
            pool = [rng.choice(base_nodes) if rng.random() < 0.25 else ex(f"n{rng.randrange(12)}")
                    for _ in range(10)]
            added = set()
            for _ in range(rng.randrange(1, 10)):
                s, o = rng.choice(pool), rng.choice(pool)
                added.add(Triple(s, ex("p"), o))
            edges = [(t.subject, t.object) for t in added]
            components = connected_components(edges)
            base_set = set(base_nodes)
            expected_floats = sum(1 for comp in components if not comp & base_set)
            got = [d for d in check_anchoring(BASE, added) if d.code == ANCHOR_FLOAT]
            assert len(got) == expected_floats


class TestLint:
    def test_pbrs_predicate_flagged(self):
        graph = RdfGraph.of([
            Triple(fred("spectator_1"), Iri(PBRS_NS + "cheer-01.agent"), fred("athlete_1")),
        ])
        diagnostics = [d for d in lint(graph) if d.code == PREFIX_MISUSE]
        assert len(diagnostics) == 1
        assert diagnostics[0].severity == WARN

    def test_clean_celebration_fragment(self):
        graph = parse_turtle("""
        @prefix fred: <http://www.ontologydesignpatterns.org/ont/fred/domain.owl#> .
        @prefix pbrs: <https://w3id.org/framester/data/propbank-3.4.0/RoleSet/> .
        @prefix pblr: <https://w3id.org/framester/data/propbank-3.4.0/LocalRole/> .
        @prefix vn.role: <http://www.ontologydesignpatterns.org/ont/vn/abox/role/vnrole.owl#> .
        fred:celebrate_1 a pbrs:celebrate-01 ;
            vn.role:Location fred:track_1 ;
            pblr:celebrate-01.honored fred:win_1 ;
            pblr:celebrate-01.honorer fred:athlete_1 .
        """)
        assert [d for d in lint(graph) if d.severity in (ERROR, WARN)] == []

    def test_declared_class_without_comment(self):
        graph = RdfGraph.of([Triple(ex("Thing"), RDF_TYPE, OWL_CLASS)])
        diagnostics = [d for d in lint(graph) if d.code == MISSING_COMMENT]
        assert len(diagnostics) == 1
        assert diagnostics[0].severity == INFO

    def test_commented_class_not_flagged(self):
        graph = RdfGraph.of([
            Triple(ex("Thing"), RDF_TYPE, OWL_CLASS),
            Triple(ex("Thing"), RDFS_COMMENT, Literal("a thing")),
        ])
        assert [d for d in lint(graph) if d.code == MISSING_COMMENT] == []

    def test_undeclared_prefix_namespace_flagged(self):
        graph = parse_turtle("mystery:a mystery:p mystery:b .", bind_undeclared=True)
        diagnostics = [d for d in lint(graph) if d.code == UNDECLARED_PREFIX]
        assert len(diagnostics) == 1
        assert "mystery" in diagnostics[0].message

    def test_fallback_role_occurrences(self):
        graph = RdfGraph.of([
            Triple(fred("a_1"), DUL_ASSOCIATED_WITH, fred("b_1")),
            Triple(fred("b_1"), DUL_ASSOCIATED_WITH, fred("c_1")),
        ])
        assert len([d for d in lint(graph) if d.code == FALLBACK_ROLE]) == 2

    def test_unknown_code_rejected(self):
        with pytest.raises(ValueError):
            Diagnostic(ERROR, "NOT_A_CODE", "nope")


MINI_ONTO = MiniOntology.from_graph(parse_turtle("""
@prefix dul: <http://www.ontologydesignpatterns.org/ont/dul/DUL.owl#> .
@prefix d0: <http://www.ontologydesignpatterns.org/ont/d0.owl#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
dul:Person rdfs:subClassOf dul:Agent .
dul:Agent rdfs:subClassOf dul:Object .
d0:Activity rdfs:subClassOf d0:Event .
d0:Event rdfs:subClassOf dul:Event .
dul:Event owl:disjointWith dul:Object .
"""))


class TestConsistency:
    def metonymic_graph(self):
        return RdfGraph.of([
            Triple(fred("athlete_1"), RDF_TYPE, fred("Athlete")),
            Triple(fred("Athlete"), RDFS_SUBCLASSOF, Iri(DUL_NS + "Person")),
            Triple(Iri(PBRS_NS + "cheer-01"), RDFS_SUBCLASSOF, Iri(D0_NS + "Activity")),
            Triple(fred("athlete_1"), RDF_TYPE, Iri(PBRS_NS + "cheer-01")),
        ])

    def test_object_event_clash_with_chain(self):
        diagnostics = check_consistency(self.metonymic_graph(), MINI_ONTO)
        assert len(diagnostics) == 1
        diag = diagnostics[0]
        assert diag.code == DISJOINT_CLASH and diag.severity == ERROR
        assert "athlete_1 -> Athlete -> Person -> Agent -> Object" in diag.message
        assert "Event" in diag.message

    def test_single_typing_clean(self):
        graph = RdfGraph.of([
            Triple(fred("athlete_1"), RDF_TYPE, fred("Athlete")),
            Triple(fred("Athlete"), RDFS_SUBCLASSOF, Iri(DUL_NS + "Person")),
        ])
        assert check_consistency(graph, MINI_ONTO) == []

    def test_shared_nondisjoint_ancestor_clean(self):
        graph = RdfGraph.of([
            Triple(fred("x_1"), RDF_TYPE, fred("A")),
            Triple(fred("x_1"), RDF_TYPE, fred("B")),
            Triple(fred("A"), RDFS_SUBCLASSOF, Iri(DUL_NS + "Person")),
            Triple(fred("B"), RDFS_SUBCLASSOF, Iri(DUL_NS + "Agent")),
        ])
        assert check_consistency(graph, MINI_ONTO) == []

    def test_monotone_in_disjointness(self):
        graph = RdfGraph.of([
            Triple(fred("x_1"), RDF_TYPE, Iri(DUL_NS + "Person")),
            Triple(fred("x_1"), RDF_TYPE, Iri(DUL_NS + "Event")),
        ])
        before = check_consistency(graph, MINI_ONTO)
        richer = MiniOntology(MINI_ONTO.subclass_of,
                              MINI_ONTO.disjoint | {frozenset((Iri(DUL_NS + "Person"), Iri(DUL_NS + "Event")))})
        after = check_consistency(graph, richer)
        assert len(after) >= len(before)

    def test_cyclic_ontology_rejected(self):
        with pytest.raises(ValueError):
            MiniOntology({Iri(DUL_NS + "A"): {Iri(DUL_NS + "B")},
                          Iri(DUL_NS + "B"): {Iri(DUL_NS + "A")}}, set())


class TestPrecedence:
    def graph_of(self, pairs):
        return RdfGraph.of([Triple(ex(a), DUL_PRECEDES, ex(b)) for a, b in pairs])

    def test_chain_inference(self):
        result = infer_precedence(self.graph_of([("wear", "race"), ("race", "win"),
                                                 ("win", "celebrate")]))
        assert (ex("wear"), ex("celebrate")) in result.inferred
        assert (ex("wear"), ex("race")) not in result.inferred  # asserted
        assert result.diagnostics == []

    def test_single_assertion(self):
        result = infer_precedence(self.graph_of([("a", "b")]))
        assert result.closure == [(ex("a"), ex("b"))]
        assert result.inferred == []

    def test_closure_is_transitively_closed_and_irreflexive(self):
        rng = random.Random(7)
        for _ in range(20):
            dag = random_dag(rng, max_nodes=20)
            result = infer_precedence(self.graph_of(dag))
            closure = set(result.closure)
            for (a, b) in closure:
                assert a != b
                for (c, d) in closure:
                    if b == c:
                        assert (a, d) in closure

    def test_matches_reachability_oracle(self):
        rng = random.Random(99)
        for _ in range(30):
            dag = random_dag(rng, max_nodes=25)
            result = infer_precedence(self.graph_of(dag))
            expected = reachability_pairs([(ex(a), ex(b)) for a, b in dag])
            assert set(result.closure) == expected

    def test_cycle_partial_result(self):
        result = infer_precedence(self.graph_of([("a", "b"), ("b", "a")]))
        assert [d.code for d in result.diagnostics] == [PRECEDES_CYCLE]
        assert result.closure  # partial reachability still returned


class TestProfile:
    def test_empty_graph_all_zero(self):
        p = profile(RdfGraph.of([]))
        assert p.as_row() == (0, 0, 0, 0, 0, 0, 0)
        assert p.new_op is None and p.new_dp is None

    def test_structural_statements_excluded(self):
        graph = RdfGraph.of([
            Triple(fred("Athlete"), RDF_TYPE, OWL_CLASS),
            Triple(fred("Athlete"), RDFS_LABEL, Literal("Athlete")),
            Triple(fred("Athlete"), RDFS_COMMENT, Literal("a sportsperson")),
            Triple(fred("athlete_1"), RDF_TYPE, fred("Athlete")),
        ])
        assert profile(graph).axioms == 1

    def test_namespace_entity_counts_are_distinct(self):
        graph = RdfGraph.of([
            Triple(fred("Athlete"), RDFS_SUBCLASSOF, Iri(WN30_NS + "supersense-noun_person")),
            Triple(fred("Runner"), RDFS_SUBCLASSOF, Iri(WN30_NS + "supersense-noun_person")),
            Triple(fred("celebrate_1"), Iri(PBLR_NS + "celebrate-01.honorer"), fred("athlete_1")),
            Triple(fred("win_1"), RDF_TYPE, Iri(PBRS_NS + "win-01")),
        ])
        p = profile(graph)
        assert (p.wordnet, p.pb_roles, p.pb_frames) == (1, 1, 1)

    def test_new_properties_split_by_object_kind(self):
        base = RdfGraph.of([Triple(fred("a_1"), RDF_TYPE, fred("A"))])
        extended = base.with_triples([
            Triple(fred("a_1"), ex("wasBuilt"), TRUE),
            Triple(fred("a_1"), ex("linksTo"), fred("b_1")),
            Triple(fred("b_1"), RDF_TYPE, fred("B")),
        ])
        p = profile(extended, base)
        assert p.axioms == 3
        assert p.new_dp == 1 and p.new_op == 1  # rdf:type present in base

    def test_union_subadditive(self):
        rng = random.Random(3)
        from generators import random_rdf_graph
        for _ in range(10):
            g = random_rdf_graph(rng)
            h = random_rdf_graph(rng)
            union = RdfGraph.of(g.triples | h.triples, g.prefixes)
            assert profile(union).axioms <= profile(g).axioms + profile(h).axioms
