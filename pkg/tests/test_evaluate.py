import numpy as np
import pandas as pd
import pytest

from SEDAtom.evaluate import (
    CollapseMonitor,
    DetectorVerdict,
    IonizationMonitor,
    Trace,
    TraceRow,
    VerdictKind,
    WeightedHistogram,
    critical_L_monitor,
    detect_collapse,
    detect_ionization,
    histogram_edges,
    ks_distance,
    radial_histogram,
    trace_histograms,
    trace_verdicts,
    weighted_percentiles,
)
from SEDAtom.sed_utils import (
    DiagnosticsConfig,
    State,
    ValidationError,
    elements_from_state,
    ground_state_distribution,
    kepler_propagate,
    kepler_radial_cdf,
    radial_cdf,
)


def _frame(t, r=None, E=None, L=None, ecc=None, dt=None) -> pd.DataFrame:
    t = np.asarray(t, dtype=float)
    ones = np.ones_like(t)
    return pd.DataFrame(
        {
            "t": t,
            "r": ones if r is None else r,
            "E": -0.5 * ones if E is None else E,
            "L": ones if L is None else L,
            "ecc": 0.0 * ones if ecc is None else ecc,
            "dt": np.gradient(t) if dt is None else dt,
        }
    )


def _row(t, r=1.0, dt=0.1) -> TraceRow:
    return TraceRow(t=t, r=r, E=-0.5, L=1.0, ecc=0.0, dt=dt)


# -------------------------------------------------------------------------
# Trace
# -------------------------------------------------------------------------

def test_trace_stride_keeps_total_time():
    full = Trace(stride=1)
    decimated = Trace(stride=4)
    for i in range(10):
        row = _row(0.1 * i, r=1.0 + i, dt=0.1 + 0.01 * i)
        full.append(row)
        decimated.append(row)
    decimated.flush()
    assert len(full) == 10
    assert len(decimated) == 3
    assert decimated.total_time == pytest.approx(full.total_time, rel=1e-14)
    np.testing.assert_allclose(decimated.column("r"), [1.0, 5.0, 9.0])
    np.testing.assert_allclose(decimated.column("dt"), [0.46, 0.62, 0.37])


def test_trace_rejects_non_increasing_time():
    trace = Trace()
    trace.append(_row(1.0))
    with pytest.raises(ValidationError):
        trace.append(_row(1.0))


def test_trace_row_weight_must_be_positive():
    with pytest.raises(ValidationError):
        _row(0.0, dt=0.0)


def test_trace_record_uses_osculating_elements():
    state = State(t=0.5, r=(0.0, 2.0, 0.0), v=(-1.0 / np.sqrt(2.0), 0.0, 0.0))
    trace = Trace().record(state, elements_from_state(state, Z=1), dt=0.01)
    row = next(trace.rows())
    assert row.t == 0.5
    assert row.r == pytest.approx(2.0)
    assert row.E == pytest.approx(-0.25)
    assert row.L == pytest.approx(np.sqrt(2.0))
    assert row.ecc == pytest.approx(0.0, abs=1e-12)
    assert row.dt == 0.01


def test_trace_grows_beyond_capacity():
    trace = Trace(capacity=2)
    for i in range(9):
        trace.append(_row(float(i)))
    assert len(trace) == 9
    np.testing.assert_array_equal(trace.column("t"), np.arange(9.0))


def test_trace_frame_round_trip():
    trace = Trace()
    for i in range(5):
        trace.append(_row(0.5 * i, r=2.0 - 0.1 * i))
    restored = Trace.from_frame(trace.to_frame())
    np.testing.assert_array_equal(restored.array, trace.array)
    with pytest.raises(ValidationError, match="ecc"):
        Trace.from_frame(trace.to_frame().drop(columns=["ecc"]))


def test_trace_from_array_checks_order():
    with pytest.raises(ValidationError):
        Trace.from_array(np.array([[1.0, 1, -0.5, 1, 0, 0.1], [0.5, 1, -0.5, 1, 0, 0.1]]))


def test_trace_restore_keeps_pending_group():
    trace = Trace(stride=3)
    for i in range(5):
        trace.append(_row(float(i), r=1.0 + i))
    restored = Trace.restore(*trace.snapshot_arrays())
    assert restored.pending_count == trace.pending_count == 2
    for t in (5.0, 6.0):
        trace.append(_row(t))
        restored.append(_row(t))
    np.testing.assert_array_equal(restored.flush().array, trace.flush().array)


# -------------------------------------------------------------------------
# Histograms
# -------------------------------------------------------------------------

def test_weighted_histogram_uses_time_weights():
    hist = WeightedHistogram.from_samples([0.5, 1.5, 1.6, 5.0], [1.0, 2.0, 3.0, 4.0], edges=[0.0, 1.0, 2.0])
    np.testing.assert_array_equal(hist.mass, [1.0, 5.0])
    assert hist.total_weight == 6.0
    assert float((hist.density() * hist.widths).sum()) == pytest.approx(1.0)
    np.testing.assert_allclose(hist.cdf_at_edges(), [0.0, 1.0 / 6.0, 1.0])


def test_histogram_merge_is_additive():
    edges = np.linspace(0.0, 1.0, 5)
    a = WeightedHistogram.from_samples([0.1, 0.9], [1.0, 1.0], edges)
    b = WeightedHistogram.from_samples([0.3], [2.0], edges)
    merged = a.merge(b)
    np.testing.assert_array_equal(merged.mass, [1.0, 2.0, 0.0, 1.0])
    with pytest.raises(ValidationError):
        a.merge(WeightedHistogram.empty([0.0, 2.0]))


def test_histogram_rejects_bad_edges():
    with pytest.raises(ValidationError):
        WeightedHistogram.empty([1.0, 1.0])
    with pytest.raises(ValidationError):
        WeightedHistogram.empty([0.0])


def test_empty_histogram_has_no_cdf():
    with pytest.raises(ValidationError):
        WeightedHistogram.empty([0.0, 1.0]).cdf_at_edges()


def test_radial_histogram_pools_traces_and_scales():
    first = _frame([0.0, 1.0, 2.0], r=[0.2, 0.4, 0.6], dt=[1.0, 1.0, 1.0])
    second = _frame([0.0, 1.0], r=[0.1, 0.3], dt=[2.0, 2.0])
    hist = radial_histogram([first, second], edges=[0.0, 0.5, 1.0, 1.5, 2.0], scale=3.0)
    # scaled radii: 0.6 1.2 1.8 | 0.3 0.9
    np.testing.assert_array_equal(hist.mass, [2.0, 3.0, 1.0, 1.0])
    assert radial_histogram(first, [0.0, 1.0], until=1.5).total_weight == 2.0


def test_radial_histogram_rejects_columns():
    with pytest.raises(ValidationError):
        radial_histogram(_frame([0.0, 1.0]), [0.0, 1.0], column="dt")


def test_radial_histogram_of_kepler_orbit(perihelion):
    start = perihelion(a=1.0, e=0.75)
    period = elements_from_state(start, 1).period
    n = 20_000
    t = np.arange(n) * (period / n)
    r = [kepler_propagate(start, 1, dt).radius for dt in t]
    edges = np.linspace(0.0, 2.1, 71)
    hist = radial_histogram(_frame(t, r=r, dt=np.full(n, period / n)), edges)

    expected = np.diff(kepler_radial_cdf(edges, 1.0, 0.75))
    np.testing.assert_allclose(hist.mass / hist.total_weight, expected, atol=5e-4)
    aphelion_bin = np.searchsorted(edges, 1.75, side="right") - 1
    assert np.argmax(hist.mass) == aphelion_bin


def test_trace_histograms_scale_energy():
    frame = _frame([0.0, 1.0], r=[1.0 / 3.0, 0.5], E=[-4.5, -1.8], L=[1.0, 1.0], dt=[1.0, 1.0])
    hists = trace_histograms(frame, Z=3, diagnostics=DiagnosticsConfig())
    assert set(hists) == {"r", "L", "E", "ecc"}
    E = hists["E"]
    # E / Z^2 = -0.5 and -0.2
    assert E.mass[np.searchsorted(E.edges, -0.5, side="right") - 1] == 1.0
    assert E.mass[np.searchsorted(E.edges, -0.2, side="right") - 1] == 1.0
    assert hists["r"].edges[-1] == DiagnosticsConfig().r_hist_max


def test_histogram_edges_follow_config():
    edges = histogram_edges(DiagnosticsConfig(r_bins=10, r_hist_max=5.0))
    np.testing.assert_allclose(edges["r"], np.linspace(0.0, 5.0, 11))
    assert edges["E"][-1] == 0.0


def test_weighted_percentiles():
    values = np.arange(1.0, 101.0)
    result = weighted_percentiles(values, np.ones(100), percentiles=(50,))
    assert result["p50"] == pytest.approx(50.5)
    skewed = weighted_percentiles([1.0, 2.0], [9.0, 1.0], percentiles=(25, 95))
    assert skewed["p25"] == 1.0
    assert skewed["p95"] == 2.0
    with pytest.raises(ValidationError):
        weighted_percentiles([], [])


# -------------------------------------------------------------------------
# Detectors
# -------------------------------------------------------------------------

def _first_collapse(t, r, Z, r_min):
    below = np.flatnonzero(Z * r < r_min)
    return None if below.size == 0 else float(t[below[0]])


def _first_ionization(t, E, Z, threshold, dwell):
    """Brute force: earliest sample time T such that every sample up to T + dwell/Z^2 stays above."""
    above = E / Z**2 > threshold
    for i in range(len(t)):
        if not above[i]:
            continue
        window = (t >= t[i]) & (t <= t[i] + dwell / Z**2)
        last = np.flatnonzero(window)[-1]
        if above[window].all() and t[last] - t[i] >= dwell / Z**2:
            return float(t[i])
    return None


@pytest.mark.parametrize("Z", [1, 3])
def test_detect_collapse_matches_scan(rng, Z):
    t = np.arange(500.0)
    r = np.abs(rng.normal(1.0, 0.3, size=500)) / Z
    r[317] = 0.01 / Z
    verdict = detect_collapse(_frame(t, r=r), r_min=0.05, Z=Z)
    assert verdict.kind == VerdictKind.COLLAPSE
    assert verdict.t_event == _first_collapse(t, r, Z, 0.05)


def test_detect_collapse_quiet_trace():
    verdict = detect_collapse(_frame(np.arange(10.0), r=np.full(10, 0.9)), r_min=0.05)
    assert verdict.kind == VerdictKind.NONE
    assert verdict.t_event is None
    assert not verdict.fired


@pytest.mark.parametrize("Z", [1, 2])
def test_detect_ionization_matches_scan(rng, Z):
    t = np.arange(2000.0) / Z**2
    E = np.where(rng.random(2000) < 0.7, -0.01, -0.5) * Z**2
    E[1200:1700] = -0.01 * Z**2
    verdict = detect_ionization(_frame(t, E=E), threshold=-0.05, dwell=300.0, Z=Z)
    expected = _first_ionization(t, E, Z, -0.05, 300.0)
    assert expected is not None
    assert verdict.kind == VerdictKind.IONIZATION
    assert verdict.t_event == pytest.approx(expected)


def test_ionization_needs_full_dwell():
    t = np.arange(100.0)
    E = np.full(100, -0.01)
    E[50] = -0.5
    assert detect_ionization(_frame(t, E=E), threshold=-0.05, dwell=60.0).kind == VerdictKind.NONE
    assert detect_ionization(_frame(t, E=E), threshold=-0.05, dwell=49.0).t_event == 0.0


def test_ionization_monitor_is_resumable():
    t = np.arange(40.0)
    E = np.where(t < 10, -0.5, -0.01)
    whole = IonizationMonitor(threshold=-0.05, dwell=20.0)
    split = IonizationMonitor(threshold=-0.05, dwell=20.0)
    for ti, Ei in zip(t, E):
        whole.update(ti, Ei)
    for ti, Ei in zip(t[:15], E[:15]):
        split.update(ti, Ei)
    resumed = IonizationMonitor(threshold=-0.05, dwell=20.0)
    resumed.load_state(split.state_dict())
    for ti, Ei in zip(t[15:], E[15:]):
        resumed.update(ti, Ei)
    assert resumed.verdict() == whole.verdict()
    assert whole.t_event == 10.0


def test_critical_L_monitor():
    t = np.arange(10.0)
    L = np.array([1.0, 0.5, 0.5, 1.0, 0.4, 0.4, 0.4, 1.0, 1.0, 0.3])
    E = np.array([-0.5, -0.05, -0.05, -0.5, -0.5, -0.02, -0.02, -0.5, -0.5, -0.01])
    verdict = critical_L_monitor(_frame(t, E=E, L=L, dt=np.ones(10)), L_crit=0.588, energy_band=-0.1)
    assert verdict.kind == VerdictKind.CRITICAL_L
    assert verdict.t_event == 1.0
    assert verdict.details["fraction_below"] == pytest.approx(0.6)
    assert verdict.details["flagged_fraction"] == pytest.approx(0.5)
    assert verdict.details["intervals"] == 3


def test_critical_L_reports_fraction_without_firing():
    L = np.array([0.3, 1.0, 1.0, 1.0])
    verdict = critical_L_monitor(_frame(np.arange(4.0), L=L, dt=np.ones(4)))
    assert verdict.kind == VerdictKind.NONE
    assert verdict.details["fraction_below"] == pytest.approx(0.25)


def test_trace_verdict_order():
    kinds = [v.kind for v in trace_verdicts(_frame(np.arange(5.0)), Z=1, diagnostics=DiagnosticsConfig())]
    assert kinds == [VerdictKind.NONE] * 3
    frame = _frame(np.arange(5.0), r=[1.0, 1.0, 0.01, 1.0, 1.0])
    verdicts = trace_verdicts(frame, Z=1, diagnostics=DiagnosticsConfig())
    assert verdicts[0] == DetectorVerdict(VerdictKind.COLLAPSE, 2.0, {"r_min": 0.05, "Z": 1})


def test_verdict_time_iff_fired():
    with pytest.raises(ValidationError):
        DetectorVerdict(VerdictKind.NONE, 1.0)
    with pytest.raises(ValidationError):
        DetectorVerdict(VerdictKind.COLLAPSE)


def test_collapse_monitor_state():
    monitor = CollapseMonitor(r_min=0.1, Z=2)
    assert not monitor.update(0.0, 0.06)
    assert monitor.update(1.0, 0.04)
    assert not monitor.update(2.0, 0.01)
    copy = CollapseMonitor(r_min=0.1, Z=2)
    copy.load_state(monitor.state_dict())
    assert copy.verdict() == monitor.verdict()


# -------------------------------------------------------------------------
# KS distance
# -------------------------------------------------------------------------

def test_ks_distance_of_ground_state_samples():
    samples = ground_state_distribution(1).rvs(size=200_000, random_state=np.random.default_rng(7))
    hist = WeightedHistogram.from_samples(samples, np.ones_like(samples), np.linspace(0.0, 30.0, 301))
    assert ks_distance(hist, radial_cdf) < 0.01


def test_ks_distance_detects_wrong_scale():
    samples = ground_state_distribution(3).rvs(size=50_000, random_state=np.random.default_rng(8))
    hist = WeightedHistogram.from_samples(samples, np.ones_like(samples), np.linspace(0.0, 30.0, 301))
    assert ks_distance(hist, radial_cdf) > 0.3


def test_ks_distance_of_point_mass():
    edges = np.linspace(0.0, 10.0, 1001)
    hist = WeightedHistogram.from_samples([1.005], [1.0], edges)
    k = np.searchsorted(edges, 1.005, side="right") - 1
    below, above = radial_cdf(edges[k]), radial_cdf(edges[k + 1])
    assert ks_distance(hist, radial_cdf) == pytest.approx(max(below, 1.0 - above), rel=1e-12)
    point = radial_cdf(1.005)
    assert ks_distance(hist, radial_cdf) == pytest.approx(max(point, 1.0 - point), abs=1e-2)


def test_ks_distance_of_empty_histogram():
    with pytest.raises(ValidationError):
        ks_distance(WeightedHistogram.empty([0.0, 1.0]), radial_cdf)
