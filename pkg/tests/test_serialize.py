import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from priorlab import serialize, standard
from priorlab.convergence import ConvergesTo, check_q_vague
from priorlab.errors import ConfigError
from priorlab.measures import Continuous, Discrete, RadonMeasure, total_mass
from priorlab.numerics import Finite, Infinite, Interval

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

MEASURE = {
    "schema_version": 1,
    "label": "tilt",
    "space": "real",
    "density": "exp(k*theta)",
    "params": {"k": 0.5},
    "scale": 3.0,
    "mass_hint": "infinite",
}


class TestSpaces:
    @pytest.mark.parametrize(
        "data, space",
        [
            ("real", Continuous(Interval.real_line())),
            ("positive", Continuous(Interval.positive())),
            ("unit-open", Continuous(Interval.open(0.0, 1.0))),
            ("unit-closed", Continuous(Interval.closed(0.0, 1.0))),
            ("naturals", Discrete(None)),
        ],
    )
    def test_named(self, data, space):
        assert serialize.space_from_json(data) == space

    @pytest.mark.parametrize(
        "space",
        [
            Continuous(Interval.real_line()),
            Continuous(Interval(0.0, 2.0, False, True)),
            Discrete(None),
            Discrete((0, 2, 5)),
        ],
    )
    def test_round_trip(self, space):
        assert serialize.space_from_json(json.loads(serialize.dumps(serialize.space_to_json(space)))) == space


class TestMeasures:
    def test_load(self):
        m = serialize.measure_from_json(MEASURE)
        t = np.array([-1.0, 0.0, 2.0])
        np.testing.assert_allclose(m.eval_density(t), 3.0 * np.exp(0.5 * t), rtol=1e-14)
        assert m.mass_hint == Infinite()

    def test_round_trip(self):
        m = serialize.measure_from_json(MEASURE)
        again = serialize.measure_from_json(serialize.measure_to_json(m))
        t = np.linspace(-4, 4, 9)
        np.testing.assert_allclose(again.eval_density(t), m.eval_density(t), rtol=1e-14)
        assert serialize.measure_to_json(again) == serialize.measure_to_json(m)

    def test_atoms_round_trip(self):
        data = {"space": "real", "atoms": [{"at": 0.0, "weight": 0.25}, {"at": 1.0, "weight": 0.75}], "scale": 2.0}
        m = serialize.measure_from_json(data)
        assert [a.weight for a in m.atoms] == [0.5, 1.5]
        again = serialize.measure_from_json(serialize.measure_to_json(m))
        assert again.atoms == m.atoms

    def test_lebesgue_config(self):
        m = serialize.load_measure(CONFIGS / "lebesgue.json")
        assert isinstance(total_mass(m), Infinite)

    def test_standard_measure_round_trip(self):
        m = standard.normal(1.0, 2.0)
        again = serialize.measure_from_json(serialize.measure_to_json(m))
        t = np.linspace(-5, 7, 13)
        np.testing.assert_allclose(again.eval_density(t), m.eval_density(t), rtol=1e-13)

    def test_lambda_measure_refuses(self):
        m = RadonMeasure(Continuous(Interval.real_line()), density=lambda t: np.exp(-t * t), mass_hint=Finite(math.sqrt(math.pi)))
        with pytest.raises(ValueError):
            serialize.measure_to_json(m)

    @pytest.mark.parametrize(
        "patch, pointer",
        [
            ({"space": "sphere"}, "/space"),
            ({"scale": -1.0}, "/scale"),
            ({"params": {"k": "big"}}, "/params/k"),
            ({"atoms": [{"at": 0.0}]}, "/atoms/0"),
            ({"extra": 1}, "/"),
            ({"schema_version": 2}, "/schema_version"),
        ],
    )
    def test_schema_pointer(self, patch, pointer):
        with pytest.raises(ConfigError) as info:
            serialize.measure_from_json({**MEASURE, **patch})
        assert f"schema violation at {pointer}:" in str(info.value)

    def test_dsl_offset(self):
        with pytest.raises(ConfigError) as info:
            serialize.measure_from_json({"space": "real", "density": "exp(theta"}, "m.json")
        assert info.value.offset == 9
        assert str(info.value).startswith("m.json:9: /density")

    def test_unbound_variable(self):
        with pytest.raises(ConfigError, match="unbound variable 'c'"):
            serialize.measure_from_json({"space": "real", "density": "theta * c"})


class TestFamilies:
    def test_normal_config(self):
        fam = serialize.load_family(CONFIGS / "normal_scale.json")
        t = np.linspace(-30, 30, 7)
        np.testing.assert_allclose(fam.member(10).eval_density(t), standard.normal(0.0, 10.0).eval_density(t), rtol=1e-12)
        assert fam.scaling_hint(10) == pytest.approx(math.sqrt(2 * math.pi) * 10)
        rep = check_q_vague(fam, standard.lebesgue())
        assert isinstance(rep.verdict, ConvergesTo) and rep.verdict.candidate_confirmed

    def test_beta_config(self):
        fam = serialize.load_family(CONFIGS / "beta_open.json")
        assert total_mass(fam.member(10)).value == pytest.approx(1.0, abs=1e-7)

    def test_round_trip(self):
        fam = serialize.load_family(CONFIGS / "normal_scale.json")
        data = serialize.family_to_json(fam)
        again = serialize.family_from_json(data)
        assert serialize.family_to_json(again) == data

    def test_atom_family(self):
        fam = serialize.family_from_json({"space": "real", "atoms": [{"at": "1/n", "weight": "1"}]})
        assert fam.member(4).atoms[0].location == 0.25

    def test_needs_some_density(self):
        with pytest.raises(ConfigError, match="schema violation at /"):
            serialize.family_from_json({"space": "real"})

    def test_broken_config(self):
        with pytest.raises(ConfigError) as info:
            serialize.load_family(CONFIGS / "broken.json")
        assert info.value.offset == 24

    def test_member_evaluation_error(self):
        with pytest.raises(ConfigError, match="member n=1"):
            serialize.family_from_json({"space": "real", "density": "factorial(theta)"})


class TestModelsAndScenarios:
    def test_model(self):
        lik, x = serialize.load_model(CONFIGS / "normal_model.json")
        assert x == 1.5
        got = lik.at(x)(np.array([1.5, 0.5]))
        np.testing.assert_allclose(got, [1 / math.sqrt(2 * math.pi), math.exp(-0.5) / math.sqrt(2 * math.pi)])
        assert lik.vanishes_at_infinity

    def test_scenario(self):
        sc = serialize.load_scenario(CONFIGS / "lindley.json")
        assert sc["mixture"].rho == 0.5 and sc["x"] == 2.0
        assert sc["grid"].values[-1] == 1000

    def test_scenario_bad_grid(self):
        data = serialize.load_json(CONFIGS / "lindley.json")
        data["grid"] = [1, 2, 3, 4]
        with pytest.raises(ConfigError, match="/grid"):
            serialize.scenario_from_json(data)

    def test_scenario_theta0_outside(self):
        data = serialize.load_json(CONFIGS / "lindley.json")
        data["alternative"]["space"] = "positive"
        with pytest.raises(ConfigError):
            serialize.scenario_from_json(data)


class TestLoadJson:
    def test_decode_offset(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"space": "real",, }')
        with pytest.raises(ConfigError) as info:
            serialize.load_json(p)
        assert info.value.offset == 17

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read file"):
            serialize.load_json(tmp_path / "absent.json")


class TestDumps:
    def test_non_finite(self):
        assert json.loads(serialize.dumps({"a": math.inf, "b": -math.inf, "c": math.nan})) == {
            "a": "inf",
            "b": "-inf",
            "c": "nan",
        }

    def test_numpy_values(self):
        out = json.loads(serialize.dumps({"v": np.arange(3.0), "f": np.float64(0.5), "b": np.bool_(True)}))
        assert out == {"b": True, "f": 0.5, "v": [0.0, 1.0, 2.0]}

    def test_sorted_and_stable(self):
        assert serialize.dumps({"b": 1, "a": 2}) == serialize.dumps({"a": 2, "b": 1})


@settings(max_examples=100, deadline=None)
@given(
    st.floats(-5, 5),
    st.floats(0.1, 100),
    st.lists(st.tuples(st.floats(-10, 10), st.floats(0.01, 10)), max_size=4, unique_by=lambda a: a[0]),
)
def test_measure_round_trip_property(k, factor, atoms):
    data = {
        "space": "real",
        "density": "exp(-(theta - k)^2)",
        "params": {"k": k},
        "scale": factor,
        "atoms": [{"at": a, "weight": w} for a, w in atoms],
        "mass_hint": {"finite": math.sqrt(math.pi) + sum(w for _, w in atoms)},
    }
    m = serialize.measure_from_json(data)
    again = serialize.measure_from_json(json.loads(serialize.dumps(serialize.measure_to_json(m))))
    t = np.linspace(-6, 6, 13)
    np.testing.assert_allclose(again.eval_density(t), m.eval_density(t), rtol=1e-13)
    assert len(again.atoms) == len(m.atoms)
    for a, b in zip(again.atoms, m.atoms):
        assert a.location == b.location and a.weight == pytest.approx(b.weight, rel=1e-13)
    assert isinstance(again.mass_hint, Finite)
    assert again.mass_hint.value == pytest.approx(m.mass_hint.value, rel=1e-13)
