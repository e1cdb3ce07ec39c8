import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from foamtor.foam import (FaceWord, Foam, FoamError, Letter, builtin,
                          cellular_homology, parse_foam, reduce_foam,
                          serialize_foam, tietze1_collapse, tietze1_expand,
                          tietze2_add_face, verify_redundancy)

TORUS_TEXT = "edges: a b\nface: a b a^-1 b^-1\n"


def test_parse_torus():
    f = parse_foam(TORUS_TEXT)
    assert (f.V, f.E, f.F) == (1, 2, 1)
    assert f.edge_ids == ("a", "b")
    assert str(f.faces[0]) == "a b a^-1 b^-1"


def test_parse_empty_word_sphere():
    f = parse_foam("edges:\nface:\n")
    assert (f.V, f.E, f.F) == (1, 0, 1)
    assert f.euler == 2
    assert len(f.faces[0]) == 0


def test_parse_dunce_hat():
    f = parse_foam("edges: a\nface: a a a^-1\n")
    assert (f.E, f.F) == (1, 1)
    assert cellular_homology(f).betti == (1, 0, 0)


def test_parse_errors_carry_position():
    with pytest.raises(FoamError, match="line 2"):
        parse_foam("edges: a\nface: a b\n")  # undeclared edge b
    with pytest.raises(FoamError, match="line 1"):
        parse_foam("edgez: a\n")
    with pytest.raises(FoamError, match="exponent"):
        parse_foam("edges: a\nface: a^2\n")


def test_parse_multivertex_chaining():
    theta = ("edges: e1 e2 e3\nvertices: 2\n"
             "edge e1: 0 1\nedge e2: 0 1\nedge e3: 0 1\n"
             "face: e1 e2^-1\nface: e2 e3^-1\n")
    f = parse_foam(theta)
    assert f.V == 2 and f.E == 3 and f.F == 2
    bad = theta.replace("face: e1 e2^-1", "face: e1 e2")
    with pytest.raises(FoamError, match="chain"):
        parse_foam(bad)
    unclosed = ("edges: e1\nvertices: 2\nedge e1: 0 1\nface: e1\n")
    with pytest.raises(FoamError, match="close"):
        parse_foam(unclosed)


def test_parse_disconnected_rejected():
    with pytest.raises(FoamError, match="connected"):
        parse_foam("edges: a\nvertices: 3\nedge a: 0 1\n")


def test_reduce_theta_graph():
    theta = ("edges: e1 e2 e3\nvertices: 2\n"
             "edge e1: 0 1\nedge e2: 0 1\nedge e3: 0 1\n"
             "face: e1 e2^-1\nface: e2 e3^-1\n")
    f = parse_foam(theta)
    r = reduce_foam(f)
    assert r.V == 1
    assert r.E == f.E - (f.V - 1)
    assert r.F == f.F
    # tree contraction preserves the rational Betti numbers
    assert cellular_homology(f).betti == cellular_homology(r).betti


def test_reduce_idempotent():
    t = builtin("torus")
    assert reduce_foam(t) is t


def test_reduce_preserves_betti_randomized():
    rng = np.random.default_rng(0)
    for _ in range(20):
        V = int(rng.integers(2, 5))
        edges = []
        # a random spanning path plus extras keeps the skeleton connected
        for v in range(1, V):
            edges.append(("t%d" % v, v - 1, v))
        for k in range(rng.integers(0, 4)):
            edges.append(("x%d" % k, int(rng.integers(V)), int(rng.integers(V))))
        foam = Foam(name="rand", n_vertices=V, edges=tuple(edges), faces=())
        # random closed words: walk the directed graph and return via the path
        faces = []
        for k in range(rng.integers(0, 3)):
            word = []
            cur = 0
            for _ in range(int(rng.integers(1, 6))):
                cands = [(i, +1, d) for i, (_, s, d) in enumerate(foam.edges) if s == cur]
                cands += [(i, -1, s) for i, (_, s, d) in enumerate(foam.edges) if d == cur]
                if not cands:
                    break
                i, sgn, nxt = cands[int(rng.integers(len(cands)))]
                word.append(Letter(foam.edges[i][0], sgn))
                cur = nxt
            while cur != 0:  # walk home along the tree path
                word.append(Letter("t%d" % cur, -1))
                cur -= 1
            faces.append(FaceWord(tuple(word)))
        foam = Foam(name="rand", n_vertices=V, edges=tuple(edges), faces=tuple(faces))
        red = reduce_foam(foam)
        assert red.V == 1 and red.E == foam.E - (foam.V - 1) and red.F == foam.F
        assert cellular_homology(foam).betti == cellular_homology(red).betti


def test_cellular_homology_builtins():
    assert cellular_homology(builtin("sphere")).betti == (1, 0, 1)
    assert cellular_homology(builtin("sphere")).euler == 2
    assert cellular_homology(builtin("torus")).betti == (1, 2, 1)
    assert cellular_homology(builtin("torus")).euler == 0
    assert cellular_homology(builtin("dunce_hat")).betti == (1, 0, 0)
    assert cellular_homology(builtin("dunce_hat")).euler == 1
    assert cellular_homology(builtin("projective_plane")).betti == (1, 0, 0)
    # both appendix relators are commutators, so boundary2 = 0 over Q
    assert cellular_homology(builtin("appendix")).betti == (1, 3, 2)
    for g in range(4):
        rep = cellular_homology(builtin("genus:%d" % g))
        if g == 0:
            assert rep.betti == (1, 0, 1)
        else:
            assert rep.betti == (1, 2 * g, 1)


def test_boundary_composition_is_zero():
    for name in ("torus", "genus:2", "appendix", "dunce_hat"):
        f = builtin(name)
        rep = cellular_homology(f)
        d1 = np.array(rep.boundary1, dtype=int).reshape(f.V, f.E)
        d2 = np.array(rep.boundary2, dtype=int).reshape(f.E, f.F)
        assert not np.any(d1 @ d2)
        assert rep.betti[0] - rep.betti[1] + rep.betti[2] == rep.euler


def test_boundary2_uses_net_exponents():
    rep = cellular_homology(builtin("dunce_hat"))
    assert rep.boundary2 == ((1,),)  # a a a^-1 has net exponent 1
    rep = cellular_homology(builtin("projective_plane"))
    assert rep.boundary2 == ((2,),)


def test_tietze1_roundtrip():
    t = builtin("torus")
    f = tietze1_expand(t, "a1 b1", "c")
    assert f.E == 3 and f.F == 2
    assert str(f.faces[-1]) == "c b1^-1 a1^-1"
    assert f.euler == t.euler
    assert cellular_homology(f).betti[2] == cellular_homology(t).betti[2]
    back = tietze1_collapse(f, "c")
    assert back == t


def test_tietze1_errors():
    t = builtin("torus")
    with pytest.raises(FoamError):
        tietze1_expand(t, "a1", "a1")       # name collision
    with pytest.raises(FoamError):
        tietze1_expand(t, "c", "c")         # word references the new edge
    with pytest.raises(FoamError):
        tietze1_collapse(t, "a1")           # a1 occurs twice in the face


def test_tietze2_and_redundancy():
    from foamtor.connection import analytic_flat
    rng = np.random.default_rng(1)
    t = builtin("torus")
    dup = tietze2_add_face(t, "a1 b1 a1^-1 b1^-1")
    assert dup.F == 2 and dup.E == 2
    samples = [analytic_flat("torus", rng) for _ in range(50)]
    assert verify_redundancy(t, FaceWord((Letter("a1", 1), Letter("b1", 1),
                                          Letter("a1", -1), Letter("b1", -1))),
                             samples) < 1e-12
    # the word "a1" is unconstrained on the flat set: holonomy = a itself
    worst = verify_redundancy(t, "a1", samples)
    assert worst > 0.1


def test_builtin_catalog():
    g2 = builtin("genus:2")
    assert g2.E == 4 and g2.F == 1 and len(g2.faces[0]) == 8
    app = builtin("appendix")
    assert app.E == 3 and app.F == 2
    assert builtin("genus", 0).name == "sphere"
    with pytest.raises(FoamError):
        builtin("genus", -1)
    with pytest.raises(FoamError):
        builtin("unknown_thing")


def test_serialize_roundtrip_builtins():
    for name in ("sphere", "torus", "genus:3", "appendix", "dunce_hat",
                 "projective_plane"):
        f = builtin(name)
        assert parse_foam(serialize_foam(f), name=f.name) == f


def test_serialize_roundtrip_multivertex():
    theta = ("edges: e1 e2 e3\nvertices: 2\n"
             "edge e1: 0 1\nedge e2: 0 1\nedge e3: 0 1\n"
             "face: e1 e2^-1\nface: e2 e3^-1\n")
    f = parse_foam(theta)
    assert parse_foam(serialize_foam(f)) == f


def test_json_roundtrip():
    f = builtin("appendix")
    assert Foam.from_json(f.to_json()) == f


@st.composite
def random_reduced_foams(draw):
    n_edges = draw(st.integers(0, 4))
    ids = ["e%d" % i for i in range(n_edges)]
    faces = []
    for _ in range(draw(st.integers(0, 3))):
        length = draw(st.integers(0, 6)) if ids else 0
        letters = tuple(Letter(draw(st.sampled_from(ids)), draw(st.sampled_from([1, -1])))
                        for _ in range(length))
        faces.append(FaceWord(letters))
    return Foam(name="h", edges=tuple((e, 0, 0) for e in ids), faces=tuple(faces))


@given(random_reduced_foams())
@settings(max_examples=60, deadline=None)
def test_parse_serialize_roundtrip_property(f):
    assert parse_foam(serialize_foam(f), name="h") == f
    rep = cellular_homology(f)
    assert rep.betti[0] - rep.betti[1] + rep.betti[2] == rep.euler
