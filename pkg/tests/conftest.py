import json
from pathlib import Path

import numpy as np
import pytest

from liebertrand import CurveSpec, LieStructure

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"

# Bertrand family lam kappa + mu kappa H = 1 with H = tan(s), lam=0.5, mu=0.3
PAIR_KAPPA = "1/(0.5+0.3*tan(s))"
PAIR_TAU = "1/(0.5+0.3*tan(s))*tan(s)+{tg}"

# Bertrand family whose mate is a slant helix (sigma = 2), lam=0.5, mu=0.3
_G = "(s/2-0.3)"
_H = f"((0.15+{_G}*sqrt(0.34-{_G}^2))/(0.25-{_G}^2))"
SLANT_PAIR_KAPPA = f"1/(0.5+0.3*{_H})"
SLANT_PAIR_TAU = f"{_H}/(0.5+0.3*{_H})+{{tg}}"


def pair_spec(tau_G=0.5, domain=(0.7, 1.2), n=2001):
    return CurveSpec(PAIR_KAPPA, PAIR_TAU.format(tg=tau_G), domain, n,
                     LieStructure(tau_G))


def slant_pair_spec(tau_G=0.5, domain=(0.1, 0.5), n=2001):
    return CurveSpec(SLANT_PAIR_KAPPA, SLANT_PAIR_TAU.format(tg=tau_G),
                     domain, n, LieStructure(tau_G))


def load_json(path):
    return json.loads(Path(path).read_text())


@pytest.fixture(scope="session")
def configs_dir():
    return CONFIGS


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


# criterion lines collected by test_acceptance.py, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1][2:])):
            terminalreporter.write_line(line)
