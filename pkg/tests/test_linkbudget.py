import json
import math

import numpy as np
import pytest

from risim import (
    ArrayGeometry,
    CodingMask,
    ConfigError,
    DomainError,
    L_PE_1BIT_DB,
    LinkScenario,
    PhaseMask,
    Point3,
    element_position,
    f_combine,
    f_combine_grid,
    geometric_accumulation,
    integrate_psd,
    phase_error_loss,
    quantize_1bit,
    received_power,
    required_cascade_mask,
    rx_distance,
    snr_ceiling,
    unit_cell_gain,
)


@pytest.fixture(scope="module")
def bench(cfg):
    return cfg.link_scenario()


def test_rx_distance_examples():
    assert rx_distance(Point3(0.0, 0.0, 5.0), Point3(0.0, 0.0, 0.0)) == 5.0
    assert rx_distance(Point3(3.0, 0.0, 4.0), Point3(0.0, 0.0, 0.0)) == 5.0
    assert rx_distance(Point3(1.0, 2.0, 3.0), Point3(1.0, 2.0, 3.0)) == 0.0


def test_f_combine_range_and_center_dominance(bench):
    grid = f_combine_grid(bench)
    assert grid.shape == (16, 10)
    assert np.all(grid >= 0.0) and np.all(grid <= 1.0)
    # the taper peaks near the middle of the aperture, not at a corner
    assert grid[7:9, 4:6].max() > grid[0, 0]
    assert grid[7:9, 4:6].max() > grid[15, 9]


def test_f_combine_scalar_matches_grid(bench):
    grid = f_combine_grid(bench)
    assert f_combine(bench, 1, 1) == grid[0, 0]
    assert f_combine(bench, 16, 10) == grid[15, 9]
    with pytest.raises(DomainError):
        f_combine(bench, 0, 1)
    with pytest.raises(DomainError):
        f_combine(bench, 1, 11)


def test_f_combine_single_element_on_axis():
    # one element, both nodes on its normal: every cosine is exactly 1
    geom = ArrayGeometry(1, 1, 0.016)
    sc = LinkScenario(
        geom,
        feed=Point3(0.0, 0.0, 0.3),
        rx=Point3(0.0, 0.0, 5.0),
        wavelength=0.0545,
        cell_dx=0.016,
        cell_dy=0.016,
        tx_power_dbm=0.0,
        gain_tx_dbi=0.0,
        gain_rx_dbi=0.0,
    )
    assert f_combine(sc, 1, 1) == pytest.approx(1.0, rel=1e-12)
    assert geometric_accumulation(sc) == pytest.approx(1.0 / (0.3 * 5.0), rel=1e-12)


def test_geometric_accumulation_bench_value(bench):
    acc = geometric_accumulation(bench)
    assert acc == pytest.approx(74.19, rel=0.05)
    assert acc == pytest.approx(74.19051107862097, rel=1e-12)


def test_geometric_accumulation_grows_with_aperture(bench):
    small = LinkScenario(
        ArrayGeometry(8, 10, 0.016),
        feed=bench.feed,
        rx=bench.rx,
        wavelength=bench.wavelength,
        cell_dx=0.016,
        cell_dy=0.016,
        tx_power_dbm=bench.tx_power_dbm,
        gain_tx_dbi=12.0,
        gain_rx_dbi=12.0,
    )
    assert geometric_accumulation(small) < geometric_accumulation(bench)


def test_required_cascade_mask_cancels_path_phase(bench):
    req = required_cascade_mask(bench)
    k0 = 2 * math.pi / bench.wavelength
    pos = element_position(bench.geom, 3, 7)
    total = rx_distance(bench.feed, pos) + rx_distance(bench.rx, pos)
    assert req.phases_deg[2, 6] == pytest.approx(math.degrees(k0 * total) % 360.0, abs=1e-9)


def test_phase_error_loss_zero_when_exact():
    geom = ArrayGeometry(4, 4, 0.016)
    bits = np.array([[0, 1, 0, 1]] * 4, dtype=np.uint8)
    applied = CodingMask(geom, bits)
    required = PhaseMask(geom, applied.phases_deg())
    assert phase_error_loss(required, applied) == 0.0


def test_phase_error_loss_uniform_gradient_hits_analytic_value():
    geom = ArrayGeometry(40, 25, 0.001)
    phases = np.linspace(0.0, 360.0, 1000, endpoint=False).reshape(40, 25)
    required = PhaseMask(geom, phases)
    loss = phase_error_loss(required, quantize_1bit(required))
    assert loss == pytest.approx(L_PE_1BIT_DB, abs=0.1)
    assert L_PE_1BIT_DB == pytest.approx(-3.9224, abs=5e-4)


def test_phase_error_loss_complement_invariance(rng):
    geom = ArrayGeometry(6, 5, 0.016)
    required = PhaseMask(geom, rng.uniform(0.0, 360.0, (6, 5)))
    applied = quantize_1bit(required)
    flipped = CodingMask(geom, 1 - applied.bits)
    assert phase_error_loss(required, applied) == pytest.approx(
        phase_error_loss(required, flipped), abs=1e-12
    )


def test_phase_error_loss_shape_mismatch():
    a = PhaseMask(ArrayGeometry(4, 4, 0.016), np.zeros((4, 4)))
    b = CodingMask(ArrayGeometry(4, 5, 0.016), np.zeros((4, 5), dtype=np.uint8))
    with pytest.raises(DomainError):
        phase_error_loss(a, b)


def test_unit_cell_gain_bench_value():
    g = unit_cell_gain(0.016, 0.016, 0.0545)
    assert g == pytest.approx(0.34, abs=0.02)
    assert g == pytest.approx(10 * math.log10(4 * math.pi * 0.016**2 / 0.0545**2), rel=1e-12)
    with pytest.raises(DomainError):
        unit_cell_gain(0.0, 0.016, 0.0545)


def test_snr_ceiling_examples():
    assert snr_ceiling(-43.87, -94.0) == pytest.approx(50.13)
    assert snr_ceiling(-94.0, -94.0) == 0.0
    with pytest.raises(DomainError):
        snr_ceiling(math.inf, -94.0)


def test_integrate_psd_examples():
    assert integrate_psd(-84.5, 1200) == pytest.approx(-53.7, abs=0.05)
    assert integrate_psd(-122.0, 1200) == pytest.approx(-91.2, abs=0.05)
    assert integrate_psd(-50.0, 1) == -50.0
    with pytest.raises(DomainError):
        integrate_psd(-50.0, 0)


def test_received_power_bench_band(bench):
    report = received_power(bench)
    assert report.received_power_dbm == pytest.approx(-43.87, abs=0.5)
    assert report.snr_db == pytest.approx(50.1, abs=0.5)
    assert report.phase_error_loss_db == pytest.approx(-3.92, abs=0.01)
    assert report.quantization == "analytic"


def test_received_power_no_quantization_exact_offset(bench):
    ideal = received_power(bench, "none")
    quantized = received_power(bench, "analytic")
    assert ideal.received_power_dbm - quantized.received_power_dbm == pytest.approx(
        -L_PE_1BIT_DB, abs=1e-12
    )
    assert ideal.phase_error_loss_db == 0.0


def test_received_power_terms_sum_to_total(bench):
    for mode in ("analytic", "none"):
        report = received_power(bench, mode)
        assert sum(report.terms_db.values()) == pytest.approx(
            report.received_power_dbm, abs=1e-6
        )


def test_received_power_tx_power_linearity(bench):
    from dataclasses import replace

    louder = replace(bench, tx_power_dbm=bench.tx_power_dbm + 10.0)
    assert received_power(louder).received_power_dbm == pytest.approx(
        received_power(bench).received_power_dbm + 10.0, abs=1e-9
    )


def test_received_power_mask_modes_require_mask(bench):
    with pytest.raises(ConfigError):
        received_power(bench, "mask")
    with pytest.raises(ConfigError):
        received_power(bench, "single_pass")
    with pytest.raises(ConfigError):
        received_power(bench, "two_bit")


def test_single_pass_with_matched_mask_near_analytic(cfg, bench):
    mask = quantize_1bit(required_cascade_mask(bench))
    report = received_power(bench.with_mask(mask), "single_pass")
    assert report.phase_error_loss_db == 0.0
    assert report.received_power_dbm == pytest.approx(
        received_power(bench).received_power_dbm, abs=1.0
    )


def test_single_pass_never_beats_ideal(bench, rng):
    ideal = received_power(bench, "none").received_power_dbm
    for _ in range(25):
        mask = CodingMask(bench.geom, rng.integers(0, 2, (16, 10)))
        got = received_power(bench.with_mask(mask), "single_pass").received_power_dbm
        assert got <= ideal + 1e-9


def test_matched_mask_beats_random_masks(bench, rng):
    mask = quantize_1bit(required_cascade_mask(bench))
    matched = received_power(bench.with_mask(mask), "single_pass").received_power_dbm
    for _ in range(50):
        rand = CodingMask(bench.geom, rng.integers(0, 2, (16, 10)))
        got = received_power(bench.with_mask(rand), "single_pass").received_power_dbm
        assert got <= matched


def test_mask_mode_is_ideal_plus_phase_error_loss(bench, rng):
    ideal = received_power(bench, "none").received_power_dbm
    for _ in range(10):
        mask = CodingMask(bench.geom, rng.integers(0, 2, (16, 10)))
        sc = bench.with_mask(mask)
        report = received_power(sc, "mask")
        loss = phase_error_loss(required_cascade_mask(sc), mask)
        assert report.phase_error_loss_db == loss
        assert report.received_power_dbm == pytest.approx(ideal + loss, abs=1e-9)


def test_mask_mode_tracks_single_pass_when_matched(bench):
    # the factored-loss accounting ignores amplitude weighting inside the
    # sum; with small residuals it stays close to the exact accounting
    mask = quantize_1bit(required_cascade_mask(bench))
    sc = bench.with_mask(mask)
    a = received_power(sc, "mask").received_power_dbm
    b = received_power(sc, "single_pass").received_power_dbm
    assert a == pytest.approx(b, abs=0.5)


def test_accountings_coincide_for_single_element():
    geom = ArrayGeometry(1, 1, 0.016)
    sc = LinkScenario(
        geom,
        feed=Point3(0.0, 0.0, 0.3),
        rx=Point3(0.0, 0.0, 5.0),
        wavelength=0.0545,
        cell_dx=0.016,
        cell_dy=0.016,
        tx_power_dbm=0.0,
        gain_tx_dbi=0.0,
        gain_rx_dbi=0.0,
        mask=CodingMask(geom, np.array([[1]], dtype=np.uint8)),
    )
    a = received_power(sc, "mask").received_power_dbm
    b = received_power(sc, "single_pass").received_power_dbm
    assert a == pytest.approx(b, abs=1e-9)


def test_hardware_loss_ledger(bench):
    from dataclasses import replace

    lossy = replace(bench, include_hardware_loss=True)
    base = received_power(bench)
    report = received_power(lossy)
    assert report.hardware_loss_items_db == {"dielectric_and_diode": 3.0, "cables": 6.87}
    assert report.received_power_dbm == pytest.approx(
        base.received_power_dbm - 9.87, abs=1e-9
    )
    assert report.received_power_dbm == pytest.approx(-53.7, abs=3.1)


def test_report_json_and_table(bench):
    report = received_power(bench)
    doc = json.loads(report.to_json())
    assert doc["quantization"] == "analytic"
    assert doc["terms_db"]["gain_tx_db"] == 12.0
    table = report.table()
    assert "received_power_dbm" in table
    assert "accumulation_db" in table
    assert len({len(line.rsplit(None, 1)[0]) for line in table.splitlines()}) >= 1


def test_scenario_validation():
    geom = ArrayGeometry(2, 2, 0.016)
    with pytest.raises(DomainError):
        LinkScenario(geom, Point3(0, 0, 0.0), Point3(0, 0, 5.0), 0.0545, 0.016, 0.016, 0.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        LinkScenario(geom, Point3(0, 0, 0.3), Point3(0, 0, 5.0), -1.0, 0.016, 0.016, 0.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        LinkScenario(
            geom, Point3(0, 0, 0.3), Point3(0, 0, 5.0), 0.0545, 0.016, 0.016, math.nan, 0.0, 0.0
        )


def test_with_rx_and_with_mask_builders(bench, board):
    moved = bench.with_rx(Point3(1.0, 0.072, 1.0))
    assert moved.rx.x == 1.0 and moved.feed == bench.feed
    mask = CodingMask(board, np.zeros((16, 10), dtype=np.uint8))
    assert bench.with_mask(mask).mask is mask
    assert bench.mask is None
