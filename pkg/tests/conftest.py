from __future__ import annotations

import pathlib

import pytest

from strandlab.documents import load_document

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: str) -> pathlib.Path:
    return FIXTURES / f"{name}.json"


@pytest.fixture(scope="session")
def r1_space():
    return load_document(fixture_path("r1_space"))


@pytest.fixture(scope="session")
def r1_system():
    return load_document(fixture_path("r1_system"))


@pytest.fixture(scope="session")
def r1_t5_space():
    return load_document(fixture_path("r1_t5_space"))


@pytest.fixture(scope="session")
def r1_choice_protocol():
    return load_document(fixture_path("r1_choice_protocol"))


@pytest.fixture(scope="session")
def nack_space():
    return load_document(fixture_path("nack_space"))


@pytest.fixture(scope="session")
def nack_system():
    return load_document(fixture_path("nack_system"))


@pytest.fixture(scope="session")
def nack_protocol():
    return load_document(fixture_path("nack_protocol"))


@pytest.fixture(scope="session")
def u1u2u3_protocol():
    return load_document(fixture_path("u1u2u3_protocol"))


@pytest.fixture(scope="session")
def ping_space():
    return load_document(fixture_path("ping_space"))
