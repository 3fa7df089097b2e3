import json

import numpy as np
import pytest

from walshlab.analysis import PExponent
from walshlab.experiments import (
    ConfigError,
    ExperimentConfig,
    corollary_suite,
    theorem1_weak_type,
    theorem2_growth,
    theorem2_weak_divergence,
    verify_all,
    verify_kernel_l1_sandwich,
    verify_kernels,
    verify_lemma1,
)
from walshlab.operators import RhoWeight, TableWeight, UnitWeight
from walshlab.reporting import load_report


# -- config ---------------------------------------------------------------------


def test_config_roundtrip():
    cfg = ExperimentConfig(
        p_list=("1/2", "1/4"),
        support_levels=(4, 5),
        resolution=10,
        scales=(3, 4, 5),
        trials=20,
        seed=7,
        probes=((4, 0), (5, 1)),
        expectation="divergent",
    )
    back = ExperimentConfig.from_json_dict(json.loads(json.dumps(cfg.to_json_dict())))
    assert back == cfg


def test_config_rejects_unknown_and_bad_fields():
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig.from_json_dict({"p_list": ["1/2"], "nonsense": 1, "trials": "many"})
    problems = "; ".join(exc.value.problems)
    assert "nonsense" in problems and "trials" in problems


def test_config_rejects_bad_exponent():
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig.from_json_dict({"p_list": ["5/4"]})
    assert "5/4" in "; ".join(exc.value.problems)


# -- kernel sweeps -----------------------------------------------------------------


def test_verify_kernels_passes():
    rep = verify_kernels(7)
    assert rep.verdict
    assert rep.summary["mismatches"] == 0
    assert rep.summary["kernels_checked"] == 128
    assert rep.summary["spot_order3_at_m2"] == [3, 1, 1, -1]
    assert {c["check"] for c in rep.cases} == {
        "direct_vs_fast",
        "closed_form_powers",
        "shift_identity",
    }


def test_verify_kernels_resolution_cap():
    with pytest.raises(ValueError):
        verify_kernels(13)


def test_verify_lemma1_passes_with_unit_ratio():
    rep = verify_lemma1(8)
    assert rep.verdict
    # At finite resolution the bound is loose: the observed ratio is exactly 1.
    assert rep.summary["min_ratio"] == 1.0
    assert rep.summary["bound_ever_tight"] is False


def test_verify_sandwich_passes():
    rep = verify_kernel_l1_sandwich(9)
    assert rep.verdict
    assert rep.summary["max_variation_over_norm"] <= 8.0
    assert rep.summary["max_norm_over_variation"] <= 1.0
    # Power-of-two orders: norm 1, variation 2, ratio exactly one half.
    assert rep.summary["min_norm_over_variation"] <= 0.5


def test_verify_all_aggregates():
    rep = verify_all(6)
    assert rep.verdict
    assert [c["experiment"] for c in rep.cases] == [
        "kernel-identities",
        "kernel-lower-bound",
        "kernel-l1-sandwich",
    ]


# -- weak type on atoms ---------------------------------------------------------------


def _small_thm1_cfg(**overrides):
    base = dict(p_list=("1/2",), support_levels=(3, 4, 5), trials=15, seed=42)
    base.update(overrides)
    return ExperimentConfig(**base)


def test_theorem1_small_run_passes():
    rep = theorem1_weak_type(_small_thm1_cfg())
    assert rep.verdict
    stats = rep.summary["per_p"]["1/2"]
    assert stats["stable"] and stats["single_constant_ok"]
    assert rep.summary["sigma4_ok"] and rep.summary["sigma0_ok"]
    assert len(rep.cases) == 45


def test_theorem1_zero_shell_guard():
    # A run mixing generators includes no zero atoms at these sizes, but the
    # margin field must be present and nonpositive for every real trial.
    rep = theorem1_weak_type(_small_thm1_cfg(trials=6))
    for case in rep.cases:
        if case["sigma4_margin"] is not None:
            assert case["sigma4_margin"] <= 0


def test_theorem1_determinism_and_jobs_equivalence():
    import dataclasses

    cfg = _small_thm1_cfg(trials=8)
    a = theorem1_weak_type(cfg).to_json()
    b = theorem1_weak_type(cfg).to_json()
    assert a == b
    # parallel execution must not change any recorded number
    c = theorem1_weak_type(dataclasses.replace(cfg, jobs=2))
    assert json.loads(c.to_json())["cases"] == json.loads(a)["cases"]


def test_theorem1_config_validation():
    with pytest.raises(ConfigError):
        theorem1_weak_type(ExperimentConfig(p_list=(), support_levels=(4,)))
    with pytest.raises(ConfigError):
        theorem1_weak_type(ExperimentConfig(p_list=("1",), support_levels=(4,)))
    with pytest.raises(ConfigError):
        theorem1_weak_type(ExperimentConfig(p_list=("1/2",), support_levels=(14,)))


# -- sharpness growth --------------------------------------------------------------------


def test_theorem2_growth_small():
    cfg = ExperimentConfig(p_list=("1/2",), resolution=9, scales=tuple(range(3, 9)))
    rep = theorem2_growth(cfg)
    assert rep.verdict
    stats = rep.summary["per_p"]["1/2"]
    assert stats["strictly_increasing"]
    assert stats["slope"] == pytest.approx(2.0, abs=1e-9)
    # The full operator ratio obeys its exact finite-scale law.
    assert stats["full_ratio_law_max_err"] < 1e-9
    for case in rep.cases:
        assert case["shell_sum_rel_err"] < 1e-9


def test_theorem2_growth_validation():
    with pytest.raises(ConfigError):
        theorem2_growth(ExperimentConfig(p_list=("1/2",), resolution=4))
    with pytest.raises(ConfigError):
        theorem2_growth(ExperimentConfig(p_list=("1/2",), resolution=9, scales=(9,)))


# -- sharpness weak divergence ----------------------------------------------------------


def test_theorem2b_trivial_weight_diverges():
    cfg = ExperimentConfig(
        p_list=("1/2",), resolution=10, scales=tuple(range(4, 10)), expectation="divergent"
    )
    rep = theorem2_weak_divergence(cfg, UnitWeight())
    assert rep.verdict
    growth = rep.summary["per_p"]["1/2"]["growth_factors"]
    assert all(g == pytest.approx(2.0, rel=1e-12) for g in growth)
    assert rep.summary["pinned_interval_measures_ok"]


def test_theorem2b_reference_weight_bounded():
    cfg = ExperimentConfig(
        p_list=("1/2",), resolution=10, scales=tuple(range(4, 10)), expectation="bounded"
    )
    rep = theorem2_weak_divergence(cfg, RhoWeight(PExponent.parse("1/2")))
    assert rep.verdict
    ratios = rep.summary["per_p"]["1/2"]["ratios"]
    assert max(ratios) / min(ratios) <= 2.0


def test_theorem2b_explicit_probes_and_auto_choice():
    cfg = ExperimentConfig(p_list=("1/2",), resolution=9, probes=((5, 0), (6, 2)))
    rep = theorem2_weak_divergence(cfg, UnitWeight())
    assert [(c["n"], c["s"]) for c in rep.cases] == [(5, 0), (6, 2)]
    auto = theorem2_weak_divergence(
        ExperimentConfig(p_list=("1/2",), resolution=9, scales=(5, 6)), UnitWeight()
    )
    # With a flat weight the best probe bit is always 0 (maximal spread).
    assert [(c["n"], c["s"]) for c in auto.cases] == [(5, 0), (6, 0)]


def test_theorem2b_table_monotonicity_enforced():
    with pytest.raises(ValueError):
        TableWeight(((17, 4.0), (33, 2.0)))


def test_theorem2b_validation():
    with pytest.raises(ConfigError):
        theorem2_weak_divergence(
            ExperimentConfig(p_list=("1/2",), resolution=9, probes=((3, 3),)), UnitWeight()
        )
    with pytest.raises(ConfigError):
        theorem2_weak_divergence(
            ExperimentConfig(p_list=("1/2",), resolution=5, scales=(7,)), UnitWeight()
        )


# -- corollaries --------------------------------------------------------------------------


def test_corollary_suite_verdicts():
    rep = corollary_suite(8, "1/2", trials=9, seed=3)
    assert rep.verdict
    trends = rep.summary["trends"]
    assert trends["dyadic-orders-unit"]["stable"]
    assert trends["bounded-spread-unit"]["stable"]
    assert trends["unbounded-spread-unit"]["growing"]
    assert trends["spike-orders-rho-exponent"]["stable"]
    assert trends["polynomial-weight"]["stable"]
    assert rep.summary["dyadic_orders_vanish_off_support"]
    finding = rep.summary["stated_exponent_finding"]
    assert finding["rho_exponent_stable"]


def test_corollary_suite_validation():
    with pytest.raises(ValueError):
        corollary_suite(5, "1/2")
    with pytest.raises(ValueError):
        corollary_suite(8, "1")
    with pytest.raises(ValueError):
        corollary_suite(8, "1/2", support_levels=(4, 5))  # too few levels


# -- reports ------------------------------------------------------------------------------


def test_report_files_roundtrip(tmp_path):
    rep = verify_kernels(5)
    out = tmp_path / "rk.json"
    rep.write(out, runtime_seconds=0.1)
    loaded = load_report(out)
    assert loaded.name == rep.name and loaded.verdict == rep.verdict
    meta = json.loads((tmp_path / "rk.meta.json").read_text())
    assert "written_at" in meta and "runtime_seconds" in meta
    assert "written_at" not in out.read_text()

    csv_path = rep.write_cases_csv(tmp_path / "rk.csv")
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "check,count,mismatches"
    assert len(lines) == 1 + len(rep.cases)


def test_series_tsv(tmp_path):
    cfg = ExperimentConfig(p_list=("1/2",), resolution=8, scales=(3, 4, 5))
    rep = theorem2_growth(cfg)
    path = rep.write_series_tsv(tmp_path / "series.tsv", "n", "ratio")
    lines = path.read_text().splitlines()
    assert lines[0] == "n\tratio"
    assert len(lines) == 4
    assert lines[1].split("\t")[0] == "3"


def test_reports_byte_identical_across_runs(tmp_path):
    for build in (
        lambda: verify_all(6),
        lambda: theorem2_growth(
            ExperimentConfig(p_list=("1/2",), resolution=8, scales=(3, 4, 5))
        ),
        lambda: corollary_suite(8, "1/2", trials=5, seed=9),
    ):
        assert build().to_json() == build().to_json()
