"""Shared fixtures: the expensive census artifacts are built once per session."""

import pytest

from hadex import search


@pytest.fixture(scope="session")
def rank_table():
    return search.build_rank_table()


@pytest.fixture(scope="session")
def search_state(rank_table):
    emap, report = search.run_search(rank_table)
    return emap, report


@pytest.fixture(scope="session")
def cex_words(rank_table, search_state):
    emap, _ = search_state
    return search.counterexamples(emap, rank_table)


@pytest.fixture(scope="session")
def witness_state(rank_table):
    return search.run_search_recording(rank_table)
