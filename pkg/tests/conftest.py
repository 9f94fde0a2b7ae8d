import numpy as np
import pytest

from hopsets.graph import Graph

# Build profile used wherever a test needs a non-empty hopset at desk scale.
# The default schedule makes beta larger than n for every graph we can afford,
# which leaves the hopset empty.  These settings keep the construction intact
# (beta = 53 is h_ell for internal epsilon 1/2 and ell = 2) but drop the
# compounded stretch guarantee.
PRACTICAL = dict(internal_epsilon=0.5, stretch_epsilon=0.01)
KAPPA, RHO = 2, 0.45


def random_graph(n, extra, seed, max_weight=1e6, backbone=True):
    rng = np.random.default_rng(seed)
    edges = []
    if backbone:
        edges += [(i, i + 1, float(10 ** rng.uniform(0, np.log10(max_weight))))
                  for i in range(n - 1)]
    for _ in range(extra):
        u, v = rng.integers(0, n, 2)
        edges.append((int(u), int(v), float(10 ** rng.uniform(0, np.log10(max_weight)))))
    return Graph(n, edges)


@pytest.fixture
def practical():
    return dict(PRACTICAL)


# One line per acceptance criterion, printed at the end of the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
