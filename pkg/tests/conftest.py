import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from qsmooth.poly import parse
from qsmooth.t1 import GermPresentation


VARS4 = ["x", "y", "z", "w"]
EX1_VARS = ["x1", "x2", "x3", "x4"]


def a_k_germ(k: int) -> GermPresentation:
    f = parse(f"x^2 + y^2 + z^2 + w^{k + 1}", VARS4)
    return GermPresentation(4, (f,), tuple(VARS4))


@pytest.fixture
def node_germ():
    return a_k_germ(1)


def example_germs() -> dict:
    """The four chart germs at the claimed singular points, with their
    induced action data (order, chart weights) and pinned Tjurina numbers."""
    out = {}
    n = ["x1", "x2", "x3", "x4"]
    out["example-1"] = (
        GermPresentation(
            4, (parse("x1*x2 + x1^5 + x2^5 + x3^5 + x4^5", n),), tuple(n)
        ),
        5,
        (2, 3, 0, 1),
        16,
    )
    n2 = ["x1", "y1", "y2", "y3"]
    out["example-2"] = (
        GermPresentation(
            4,
            (
                parse(
                    "y1^3 + 2*y2^4 + y2*y3^3 + x1^2 + x1^2*(y1^4 + y2^4 + y3^4)",
                    n2,
                ),
            ),
            tuple(n2),
        ),
        2,
        (1, 0, 1, 1),
        18,
    )
    n3 = ["x1", "x2", "y1", "y2"]
    out["example-3"] = (
        GermPresentation(
            4,
            (
                parse(
                    "y1^2 + y2^3 + (1 + 2*y1^3 + y2^3)*x1^3"
                    " + (1 + y1^3 + 2*y2^3)*x2^3",
                    n3,
                ),
            ),
            tuple(n3),
        ),
        3,
        (2, 1, 0, 1),
        8,
    )
    n4 = ["x1", "x2", "x3", "x4"]
    out["example-4"] = (
        GermPresentation(
            4, (parse("x2*x3 + x1^4 + x2^4 + x3^4 + x4^2", n4),), tuple(n4)
        ),
        2,
        (0, 1, 1, 1),
        3,
    )
    return out


def icis_d2_germ() -> GermPresentation:
    """Space-curve complete intersection with an isolated singular point."""
    n = ["x", "y", "z"]
    return GermPresentation(
        3, (parse("x^2 + y^3", n), parse("y^2 + z^3", n)), tuple(n)
    )


ICIS_D2_TJURINA = 12
