from functools import lru_cache

import pytest

from harmsphere.curvio import invariants
from harmsphere.models import parse_space

MODEL_SPECS = [
    "flat:n=4",
    "flat:n=6",
    "form:n=4,k=1",
    "form:n=4,k=-1",
    "form:n=6,k=1",
    "form:n=6,k=-1",
    "dr:q=1,p=1",
    "dr:q=1,p=2",
    "dr:q=3,p=2,m=0",
    "dr:q=3,p=1,m=1",
]


@lru_cache(maxsize=None)
def point(spec: str):
    return parse_space(spec).build()


@lru_cache(maxsize=None)
def report(spec: str):
    return invariants(point(spec))


@pytest.fixture(params=MODEL_SPECS)
def model(request):
    return request.param, point(request.param), report(request.param)
