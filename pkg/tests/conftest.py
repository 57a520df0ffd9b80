import os

import pytest

from starcqa import (
    DimensionDef,
    StarSchemaDef,
    Tup,
    Warehouse,
    m_chase_generic,
    m_chase_star,
)
from starcqa.model import fd

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fig1_schema(measure_type="text", measure_fds=True):
    d1 = DimensionDef("D1", "K1", "text", (("A1_1", "text"), ("A1_2", "text")))
    d2 = DimensionDef("D2", "K2", "text", (("A2_1", "text"), ("A2_2", "text")))
    return StarSchemaDef((d1, d2), (("M1", measure_type),), measure_fds)


def fig1_warehouse(m1="m1", mp1="m'1", mpp1="m''1", measure_type="text", measure_fds=True):
    """The running-example warehouse; measures are parameters so the
    analytic tests can instantiate it numerically."""
    schema = fig1_schema(measure_type, measure_fds)
    D1 = [
        Tup({"K1": "k1", "A1_1": "a1", "A1_2": "a2"}),
        Tup({"K1": "k1", "A1_1": "a'1", "A1_2": "a2"}),
        Tup({"K1": "k'1", "A1_1": "a1"}),
        Tup({"K1": "k''1", "A1_1": "a'1", "A1_2": "a'2"}),
    ]
    D2 = [
        Tup({"K2": "k2", "A2_1": "b1", "A2_2": "b2"}),
        Tup({"K2": "k'2", "A2_1": "b1"}),
    ]
    F = [
        Tup({"K1": "k1", "K2": "k2", "M1": m1}),
        Tup({"K1": "k1", "K2": "k'2", "M1": mp1}),
        Tup({"K1": "k1", "K2": "k'2", "M1": mpp1}),
        Tup({"K1": "k'1", "K2": "k''2", "M1": m1}),
    ]
    return Warehouse(schema, [D1, D2], F)


def example8_warehouse(second_m=-10):
    d1 = DimensionDef("D1", "K1", "text", (("A1", "int"),))
    d2 = DimensionDef("D2", "K2", "text", (("A2", "int"),))
    schema = StarSchemaDef((d1, d2), (("M1", "int"),))
    D1 = [Tup({"K1": "k1", "A1": 10}), Tup({"K1": "k'1", "A1": -15}), Tup({"K1": "k'1", "A1": 20})]
    D2 = [Tup({"K2": "k2", "A2": 2}), Tup({"K2": "k'2", "A2": 0}), Tup({"K2": "k'2", "A2": 3})]
    F = [
        Tup({"K1": "k1", "K2": "k2", "M1": 30}),
        Tup({"K1": "k'1", "K2": "k'2", "M1": second_m}),
        Tup({"K1": "k1", "K2": "k'2", "M1": 100}),
    ]
    return Warehouse(schema, [D1, D2], F)


def example2_rows():
    return [Tup({"A": "a", "B": "b"}), Tup({"B": "b", "C": "c"}), Tup({"A": "a", "C": "c'"})]


def example2_fds():
    return (fd("A", "C"), fd("B", "C"))


@pytest.fixture(scope="session")
def fig1():
    return fig1_warehouse()


@pytest.fixture(scope="session")
def fig1_chase(fig1):
    return m_chase_star(fig1)


@pytest.fixture(scope="session")
def example2_chase():
    return m_chase_generic(example2_rows(), example2_fds())


@pytest.fixture(scope="session")
def fig1_manifest_path():
    return os.path.join(FIXTURES, "fig1", "manifest.json")
