"""Smoke test for the pyskotch extension.

Build it with `cargo build -p pyskotch --release` and copy
target/release/libpyskotch.so next to this file as pyskotch.so.
"""

import pyskotch


def main():
    n, edges = pyskotch.graph("matching:m=5")
    assert n == 10 and len(edges) == 5

    labels = pyskotch.label("pp-matching:eps=1/4", "matching:m=5", seed=3)
    assert len(labels) == 10
    assert labels == pyskotch.label("pp-matching:eps=1/4", "matching:m=5", seed=3)
    for u, v in edges:
        assert pyskotch.decode("pp-matching:eps=1/4", labels[u], labels[v])

    incidence = pyskotch.plane(3)
    assert len(incidence) == 13 and all(len(row) == 4 for row in incidence)

    est = pyskotch.attack("pp-matching:p=2", "matching:m=8", "pigeonhole", 20, 1)
    assert est["wins"] == 20 and est["mode"] == "single_vertex"

    try:
        pyskotch.label("pp-matching:eps=1/4", "path:n=4")
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-domain graph accepted")
    print("pyskotch smoke test ok")


if __name__ == "__main__":
    main()
