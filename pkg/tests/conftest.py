"""Pytest configuration and fixtures for cellcover tests."""
import json

import pytest
from hypothesis import HealthCheck
from hypothesis import settings as hypothesis_settings

from cellcover.config import Settings
from cellcover.models.schemas import CoverConfig
from cellcover.services.covers import rigid_group
from cellcover.services.groups import GeneratorScheme, adjoin_localized_line, from_generators, line

hypothesis_settings.register_profile(
    "cellcover",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
hypothesis_settings.load_profile("cellcover")

# ── Group fixtures ─────────────────────────────────────────────────────────────


def scheme(n, *items):
    """Generator scheme from (vector, primes) pairs."""
    return GeneratorScheme.of(n, items)


@pytest.fixture
def integers():
    return line((1,))


@pytest.fixture
def z_half():
    return line((1,), {2})


@pytest.fixture
def z_third():
    return line((1,), {3})


@pytest.fixture
def lattice2():
    """ℤ²."""
    return from_generators(scheme(2, ((1, 0), ()), ((0, 1), ())))


@pytest.fixture
def marked_plane(lattice2):
    """ℤ² with all 3-power roots of (1,1) adjoined."""
    return adjoin_localized_line(lattice2, (1, 1), 3)


@pytest.fixture
def rigid_plane():
    """Z[1/7]e1 + Z[1/11]e2 + Z[1/13](e1+e2), endomorphism ring ℤ."""
    return rigid_group(2, (7, 11, 13))


@pytest.fixture
def default_marked():
    return rigid_group(2, (7, 11, 13), {2})


@pytest.fixture
def cover_config():
    return CoverConfig()


# ── CLI fixtures ───────────────────────────────────────────────────────────────


@pytest.fixture
def write_group(tmp_path):
    """Write a group file in generator form and return its path."""
    counter = {"n": 0}

    def _write(n, *items, name=None):
        counter["n"] += 1
        path = tmp_path / (name or f"group_{counter['n']}.json")
        path.write_text(json.dumps({
            "ambient_rank": n,
            "generators": [
                {"vector": [str(c) for c in v], "inverted_primes": sorted(pi)} for v, pi in items
            ],
        }, indent=2))
        return str(path)

    return _write


@pytest.fixture
def settings():
    return Settings()


@pytest.fixture
def cli(capsys):
    """Run the CLI in-process; returns (exit_code, stdout, stderr)."""
    from cellcover.main import main

    def _run(*argv):
        code = main(list(argv))
        out = capsys.readouterr()
        return code, out.out, out.err

    return _run
