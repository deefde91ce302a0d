from fractions import Fraction

import pytest

import experiments
from constants import ExperimentKind, HistogramConstants, SpacingKind, SweepConstants
from exceptions import BudgetExhausted, ResamplingExhausted
from experiments import (
    McConfig,
    format_histogram,
    format_tally_table,
    histogram_bins,
    legendre_check,
    mc_run,
    merge_thresholds,
    parse_threshold,
    pr_complexity,
    pr_sweep,
    qr_complexity,
    qr_sweep,
    run_trial,
    spacing_distribution,
    summarize,
    tally_frame,
)
from linear_complexity import ComplexityRecord
from numtheory import is_prime, nth_prime
from results_io import records_csv


def small_mc(**overrides) -> McConfig:
    params = dict(mode=SpacingKind.QR, trials=6, window=60, prime_lo=10**12, prime_hi=10**13, seed=7)
    params.update(overrides)
    return McConfig(**params)


class TestPerPrime:
    @pytest.mark.parametrize("p, complexity, normalized", [(5, 1, Fraction(1)), (11, 3, Fraction(3, 4)), (7, 2, Fraction(1))])
    def test_qr_complexity(self, p, complexity, normalized):
        record = qr_complexity(p)
        assert (record.complexity, record.normalized) == (complexity, normalized)
        assert record.period_length == (p - 3) // 2

    @pytest.mark.parametrize("p, complexity, normalized", [(7, 0, Fraction(0)), (11, 2, Fraction(2, 3)), (13, 3, Fraction(1))])
    def test_pr_complexity(self, p, complexity, normalized):
        record = pr_complexity(p)
        assert (record.complexity, record.normalized) == (complexity, normalized)

    @pytest.mark.parametrize(
        "p, mode, expected",
        [(11, SpacingKind.QR, {1: 2, 2: 1, 4: 1}), (7, SpacingKind.PR, {2: 1}), (13, SpacingKind.PR, {1: 1, 4: 2})],
    )
    def test_spacing_distribution(self, p, mode, expected):
        assert spacing_distribution(p, mode) == expected


class TestSweeps:
    def test_qr_sweep_small(self):
        summary = qr_sweep(5, 3)
        assert [r.p for r in summary.records] == [5, 7, 11]
        assert [r.normalized for r in summary.records] == [1, 1, Fraction(3, 4)]
        assert summary.tally_perfect == 2
        assert summary.thresholds == SweepConstants.QR_THRESHOLDS
        assert summary.tallies_at[Fraction(19, 20)] == 2
        assert summary.metadata["first_prime"] == 5
        assert summary.metadata["last_prime"] == 11

    def test_pr_sweep_small(self):
        summary = pr_sweep(11, 2)
        assert [r.p for r in summary.records] == [11, 13]
        assert [r.normalized for r in summary.records] == [Fraction(2, 3), 1]
        assert summary.thresholds == SweepConstants.PR_THRESHOLDS

    @pytest.mark.parametrize("sweep", [qr_sweep, pr_sweep])
    @pytest.mark.parametrize("start", [2, 3])
    def test_rejects_small_start(self, sweep, start):
        with pytest.raises(ValueError):
            sweep(start, 10)

    def test_pr_sweep_from_five(self):
        assert [r.p for r in pr_sweep(5, 2).records] == [5, 7]

    def test_extra_thresholds_merge(self):
        summary = qr_sweep(5, 20, extra_thresholds=[Fraction(1, 2), Fraction(19, 20)])
        assert summary.thresholds == (1, Fraction(99, 100), Fraction(19, 20), Fraction(1, 2))

    def test_parallel_matches_serial(self):
        serial = qr_sweep(5, 60)
        parallel = qr_sweep(5, 60, jobs=3)
        assert parallel.records == serial.records
        assert parallel.tallies_at == serial.tallies_at
        assert parallel.histogram == serial.histogram

    def test_thresholds_are_monotone(self):
        for summary in (qr_sweep(5, 150), pr_sweep(11, 150)):
            assert list(summary.thresholds) == sorted(summary.thresholds, reverse=True)
            counts = [summary.tallies_at[t] for t in summary.thresholds]
            assert counts == sorted(counts)
            assert all(summary.tally_perfect <= c for c in counts)
            assert all(0 <= r.normalized <= 1 for r in summary.records)

    def test_forty_three_sits_exactly_on_nineteen_twentieths(self):
        record = qr_complexity(43)
        assert (record.period_length, record.complexity) == (20, 19)
        assert record.normalized == Fraction(19, 20)

    def test_strict_tally_leaves_out_boundary_values(self):
        summary = qr_sweep(5, 12)
        assert summary.records[-1].p == 43
        on_boundary = [r.p for r in summary.records if r.normalized == Fraction(19, 20)]
        assert 43 in on_boundary
        assert summary.tally_at(Fraction(19, 20)) - summary.tally_above(Fraction(19, 20)) == len(on_boundary)
        assert summary.tally_above(Fraction(1)) == 0
        assert summary.tally_above(Fraction(1, 3)) == sum(1 for r in summary.records if r.normalized > Fraction(1, 3))

    @pytest.mark.slow
    def test_qr_sweep_reproduces_thousand_prime_tallies(self):
        summary = qr_sweep(5, 1000, jobs=4)
        assert summary.records[-1].p == 7933
        assert summary.tally_perfect == 671
        assert summary.tally_at(Fraction(99, 100)) == 967
        # p = 43 lands exactly on 19/20, so the strict count is one lower
        assert summary.tally_at(Fraction(19, 20)) == 992
        assert summary.tally_above(Fraction(19, 20)) == 991
        assert [r.p for r in summary.records if r.normalized == Fraction(19, 20)] == [43]

    @pytest.mark.slow
    def test_pr_sweep_reproduces_thousand_prime_tallies_at_one_offset(self):
        expected = (610, 980, 953)
        matching = []
        for start in (SweepConstants.PR_DEFAULT_START, nth_prime(SweepConstants.PR_CODE_FIRST_INDEX)):
            s = pr_sweep(start, 1000, jobs=4)
            got = (s.tally_perfect, s.tally_at(Fraction(121, 125)), s.tally_at(Fraction(124, 125)))
            if got == expected:
                matching.append(start)
        assert matching == [SweepConstants.PR_DEFAULT_START]


class TestMonteCarlo:
    def test_full_window_on_fixed_prime_matches_sweep(self):
        for mode, direct in ((SpacingKind.QR, qr_complexity), (SpacingKind.PR, pr_complexity)):
            for p in (11, 101, 257):
                cfg = McConfig(mode=mode, trials=1, fixed_prime=p, full_window=True)
                record = mc_run(cfg).records[0]
                assert record.p == p
                assert record.window_start == 1
                assert record.normalized == direct(p).normalized

    def test_records_are_consistent(self):
        for mode in SpacingKind:
            summary = mc_run(small_mc(mode=mode))
            assert summary.kind is (ExperimentKind.MC_QR if mode is SpacingKind.QR else ExperimentKind.MC_PR)
            for trial, r in enumerate(summary.records):
                assert r.trial == trial
                assert is_prime(r.p) and r.p > 10**12
                assert 1 <= r.window_start <= r.p - 60
                assert r.period_length == r.hits - 1
                assert 0 <= r.normalized <= 1

    def test_same_seed_same_bytes(self):
        assert records_csv(mc_run(small_mc())) == records_csv(mc_run(small_mc()))
        assert records_csv(mc_run(small_mc(mode=SpacingKind.PR))) == records_csv(mc_run(small_mc(mode=SpacingKind.PR)))

    def test_different_seed_different_primes(self):
        a = mc_run(small_mc(seed=1)).records
        b = mc_run(small_mc(seed=2)).records
        assert [r.p for r in a] != [r.p for r in b]

    def test_parallel_matches_serial(self):
        assert records_csv(mc_run(small_mc(), jobs=3)) == records_csv(mc_run(small_mc()))

    def test_trial_does_not_depend_on_trial_count(self):
        short = mc_run(small_mc(trials=2)).records
        long = mc_run(small_mc(trials=6)).records
        assert long[:2] == short

    def test_degenerate_windows_hit_the_cap(self):
        # residues mod 5 are {1, 4}: no window of size 2 holds two of them
        cfg = McConfig(mode=SpacingKind.QR, trials=1, window=2, fixed_prime=5, max_resamples=3)
        with pytest.raises(ResamplingExhausted) as excinfo:
            run_trial(cfg, 0)
        assert excinfo.value.attempts == 3

    def test_budget_exhaustion_redraws_the_prime(self, monkeypatch):
        real_factorize = experiments.factorize
        calls = []

        def flaky_factorize(n, budget, curves):
            calls.append(n)
            if len(calls) == 1:
                raise BudgetExhausted(n, budget, curves)
            return real_factorize(n, budget, curves)

        monkeypatch.setattr(experiments, "factorize", flaky_factorize)
        summary = mc_run(small_mc(mode=SpacingKind.PR, trials=1))
        meta = summary.metadata
        assert meta["budget_resamples"] == 1
        assert meta["total_resamples"] == 1 + meta["window_resamples"]
        assert summary.records[0].resamples == meta["total_resamples"]
        assert len(calls) == 2
        assert calls[0] != calls[1]

    def test_metadata(self):
        summary = mc_run(small_mc())
        meta = summary.metadata
        assert meta["config"]["seed"] == 7
        assert meta["config"]["mode"] == "qr"
        assert "PCG64" in meta["rng"]
        assert meta["window_resamples"] >= 0
        assert meta["mean_hits"] == pytest.approx(sum(r.hits for r in summary.records) / 6)

    @pytest.mark.parametrize(
        "overrides",
        [
            dict(window=1),
            dict(trials=0),
            dict(prime_lo=10**13, prime_hi=10**12),
            dict(seed=-1),
            dict(seed=2**64),
            dict(rho_budget=0),
            dict(ecm_curves=-1),
            dict(fixed_prime=4),
            dict(prime_lo=50, prime_hi=10**6),
        ],
    )
    def test_config_validation(self, overrides):
        with pytest.raises(ValueError):
            small_mc(**overrides)

    @pytest.mark.slow
    def test_qr_window_statistics(self):
        summary = mc_run(McConfig(mode=SpacingKind.QR, seed=1), jobs=4)
        assert abs(summary.fraction_at(Fraction(1)) - 0.486) <= 0.05
        assert abs(summary.fraction_at(Fraction(99, 100)) - 0.947) <= 0.04
        assert 480 <= summary.metadata["mean_hits"] <= 520

    @pytest.mark.slow
    def test_pr_window_statistics(self):
        summary = mc_run(McConfig(mode=SpacingKind.PR, seed=1), jobs=4)
        assert abs(summary.fraction_at(Fraction(1)) - 0.465) <= 0.05
        assert abs(summary.fraction_at(Fraction(99, 100)) - 0.901) <= 0.05
        assert summary.metadata["budget_resamples"] < 50

    @pytest.mark.slow
    def test_large_window_spot_check(self):
        summary = mc_run(McConfig(mode=SpacingKind.QR, trials=50, window=10_000, seed=1), jobs=4)
        assert summary.fraction_at(Fraction(99, 100)) >= 0.9
        assert 4500 <= summary.metadata["mean_hits"] <= 5500


class TestTallies:
    def test_parse_threshold(self):
        assert parse_threshold("0.95") == Fraction(19, 20)
        assert parse_threshold("121/125") == Fraction(121, 125)
        assert parse_threshold("1") == 1
        with pytest.raises(ValueError):
            parse_threshold("1.5")

    def test_merge_thresholds(self):
        merged = merge_thresholds([Fraction(1), Fraction(19, 20)], [Fraction(99, 100), Fraction(19, 20)])
        assert merged == (1, Fraction(99, 100), Fraction(19, 20))

    def test_histogram_bins(self):
        bins = histogram_bins([Fraction(1), Fraction(9, 10), Fraction(1, 2), Fraction(999, 1000)])
        assert len(bins) == 1 + 50
        assert bins[0].lower == 0 and bins[0].upper == Fraction(9, 10)
        assert bins[0].count == 1
        assert bins[1].count == 1
        assert bins[-1].upper == 1
        assert bins[-1].count == 2
        assert sum(b.count for b in bins) == 4

    def test_histogram_custom_width(self):
        bins = histogram_bins([Fraction(95, 100)], Fraction(1, 20))
        assert [b.count for b in bins] == [0, 0, 1]

    def test_summarize_empty(self):
        summary = summarize(ExperimentKind.QR_SWEEP, [], SweepConstants.QR_THRESHOLDS)
        assert summary.tally_perfect == 0
        assert all(c == 0 for c in summary.tallies_at.values())
        assert summary.fraction_at(Fraction(1)) == 0.0
        assert sum(b.count for b in summary.histogram) == 0

    def test_tally_at_unlisted_threshold(self):
        records = [ComplexityRecord(11, 4, 3, Fraction(3, 4)), ComplexityRecord(5, 1, 1, Fraction(1))]
        summary = summarize(ExperimentKind.QR_SWEEP, records, (Fraction(1),))
        assert summary.tally_at(Fraction(1, 2)) == 2
        assert summary.tally_at(Fraction(1)) == 1

    def test_tally_table_and_histogram_text(self):
        summary = qr_sweep(5, 3)
        frame = tally_frame(summary)
        assert list(frame.columns) == ["tally", "threshold", "count", "above", "of"]
        assert frame["count"].tolist() == [2, 2, 2]
        assert frame["above"].tolist() == [0, 2, 2]
        table = format_tally_table(summary)
        assert "perfect (= 1)" in table
        assert "19/20" in table
        lines = format_histogram(summary).splitlines()
        assert len(lines) == len(summary.histogram)
        assert lines[-1].split()[2] == "2"
        assert HistogramConstants.BAR_WIDTH * "#" in lines[-1]


class TestLegendreCheck:
    def test_all_odd_primes_to_257_agree(self):
        check = legendre_check(257)
        assert len(check.rows) == 54
        assert check.passed
        assert check.rows[0].p == 3
