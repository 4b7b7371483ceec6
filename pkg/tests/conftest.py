import json
from pathlib import Path

import pytest

from causalspace.analysis import build_hierarchy
from causalspace.enumerator import enumerate_classes

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def catalogue3():
    with open(DATA / "catalogue3.json") as f:
        return {g["id"]: g for g in json.load(f)["classes"]}


@pytest.fixture(scope="session")
def enumeration2():
    return enumerate_classes(2)


@pytest.fixture(scope="session")
def enumeration3():
    return enumerate_classes(3)


@pytest.fixture(scope="session")
def hierarchy2(enumeration2):
    classes, _ = enumeration2
    return build_hierarchy(classes, 2)


@pytest.fixture(scope="session")
def hierarchy3(enumeration3):
    classes, _ = enumeration3
    return build_hierarchy(classes, 3)
