"""Smoke test for the dynaut_py extension.

Build and run from the repository root:

    cargo build --release -p dynaut-py --features extension-module
    cp target/release/libdynaut_py.so crates/py/python/dynaut_py.so
    python3 crates/py/python/smoke_test.py
"""

import dynaut_py as d

RUNNING = "< ([true*] b)? > < true > a"


def main():
    f = d.Formula(RUNNING)
    assert str(f) == "(< (([ true* ] b))? > (< true > a))", str(f)
    assert f.atoms() == ["b", "a"]
    assert f == d.Formula(str(f))

    good = [["b"], ["a", "b"]]
    bad = [["b"], ["a"]]
    assert f.accepts(good) and not f.accepts(bad)

    afw = d.Afw(f)
    assert afw.num_states == 3
    assert afw.stats() == {"states": 3, "transitions": 4, "max_successors": 2, "alphabet": 2}
    assert afw.accepts(good) and not afw.accepts([["b"]])
    assert "delta(0,0,neg,last)." in afw.to_asp()
    assert d.Afw.from_asp(afw.to_asp()).to_asp() == afw.to_asp()
    assert afw.to_dot().startswith("digraph automaton {")

    dfa = d.Dfa(f)
    assert dfa.num_states == 5
    assert dfa.accepts(good) and not dfa.accepts(bad)
    assert dfa.first_failure(bad) == 1
    assert dfa.equivalent(d.Dfa(d.Formula("G b & X a")))
    assert d.Dfa(d.Formula("a")).distinguishing_trace(d.Dfa(d.Formula("b"))) == [["a"]]
    assert d.Dfa(d.Formula("a & ~a")).is_empty()
    assert len(d.Dfa(d.Formula("< true > tt")).shortest_witness()) == 2

    corpus = d.read_traces('[["b"],["a","b"]]\n{"id": "x", "trace": [["b"]]}\n')
    assert corpus == [("t0", good), ("x", [["b"]])]
    for backend in ("oracle", "afw", "dfa"):
        assert d.filter_traces(f, corpus, backend=backend, jobs=2) == ["t0"]

    for bad_input, call in [
        ("a &", lambda: d.Formula("a &")),
        ("empty trace", lambda: f.accepts([])),
        ("backend", lambda: d.filter_traces(f, corpus, backend="bdd")),
    ]:
        try:
            call()
        except ValueError:
            pass
        else:
            raise AssertionError(f"no ValueError for {bad_input}")

    assert "m2l-str;" in d.Formula("a").to_mona()
    print("smoke test passed")


if __name__ == "__main__":
    main()
