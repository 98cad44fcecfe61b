"""Shared fixtures: the wiki-engines example matrix and its knowledge file."""

import json

import pytest

from afm_forge.knowledge import load_dk
from afm_forge.matrix import IngestionHints, parse_matrix

WIKI_CSV = """\
Identifier,LicenseType,LicensePrice,LanguageSupport,Language,WYSIWYG
Confluence,Commercial,10,Yes,Java,Yes
PBwiki,NoLimit,20,No,--,Yes
SimpleWiki,NoLimit,10,No,--,Yes
MoinMoin,GPL,0,Yes,Python,Yes
TWiki,GPL,0,Yes,Perl,Yes
PerlWiki,GPL,10,Yes,Perl,Yes
MediaWiki,GPL,0,Yes,PHP,No
PHPWiki,GPL,10,Yes,PHP,Yes
"""

# Knowledge equivalent of the example's accompanying table: column kinds, cell
# interpretation, root, full hierarchy, the Language null value, attribute
# places, the license group, and one interesting bound for LicensePrice.
WIKI_DK = {
    "columns": {
        "Identifier": "identifier",
        "LicenseType": "enumerated-features",
        "LicensePrice": "attribute",
        "LanguageSupport": "boolean-feature",
        "Language": "attribute",
        "WYSIWYG": "boolean-feature",
    },
    "cells": {"Yes": "present", "No": "absent"},
    "root": "Wiki engine",
    "hierarchy": {
        "LanguageSupport": "Wiki engine",
        "LicenseType": "Wiki engine",
        "WYSIWYG": "Wiki engine",
        "GPL": "LicenseType",
        "Commercial": "LicenseType",
        "NoLimit": "LicenseType",
    },
    "attributes": {"Language": {"null": "--"}},
    "placements": {"Language": "LanguageSupport", "LicensePrice": "LicenseType"},
    "groups": [["GPL", "Commercial", "NoLimit"]],
    "interesting_values": {"LicensePrice": [10]},
}

# The alternative parametrization: same matrix, different hierarchy and places.
WIKI_DK_ALT = {
    **WIKI_DK,
    "hierarchy": {
        "LanguageSupport": "LicenseType",
        "LicenseType": "Wiki engine",
        "WYSIWYG": "LicenseType",
        "GPL": "Wiki engine",
        "Commercial": "Wiki engine",
        "NoLimit": "Wiki engine",
    },
    "placements": {"Language": "Wiki engine", "LicensePrice": "Wiki engine"},
}


@pytest.fixture
def wiki_csv():
    return WIKI_CSV


@pytest.fixture
def wiki_matrix():
    return parse_matrix(WIKI_CSV, IngestionHints(identifier_columns={"Identifier"}))


@pytest.fixture
def wiki_dk():
    return load_dk(json.dumps(WIKI_DK))


@pytest.fixture
def wiki_dk_alt():
    return load_dk(json.dumps(WIKI_DK_ALT))


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    from afm_forge.kernels import warm_up

    warm_up()
