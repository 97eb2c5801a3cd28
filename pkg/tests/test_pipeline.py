import json
import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import path_tree, star_tree
from ddmtest import (
    Direction,
    LevelCounts,
    LevelSpec,
    LinearizedTree,
    TreeShape,
    analyze_collection,
    classify,
    emit_report,
    load_families,
    run_tests,
    sum_of_distances,
    tally_level,
)
from ddmtest.pipeline import _neglog10

N3_HIGH = LinearizedTree(3, [(1, 2), (1, 3)])     # D = 3
N3_LOW = path_tree(3)                             # D = 2
STAR_END = star_tree(4, hub=1)                    # D = 6
STAR_MID = star_tree(4, hub=2)                    # D = 4
LIN_TIE = LinearizedTree(4, [(1, 3), (2, 3), (2, 4)])  # D = 5
LIN_LOW = path_tree(4)                            # D = 3
LIN_HIGH = LinearizedTree(4, [(2, 4), (1, 4), (1, 3)])  # D = 7


def random_collection(seed, n_languages=4, n_sentences=60):
    rng = np.random.default_rng(seed)
    pool = [N3_HIGH, N3_LOW, STAR_END, STAR_MID, LIN_TIE, LIN_LOW, LIN_HIGH,
            path_tree(2), path_tree(5)]
    return {
        f"lang{idx}": [pool[k] for k in rng.integers(0, len(pool), n_sentences)]
        for idx in range(n_languages)
    }


class TestTallyLevel:
    def test_n3_counts(self):
        counts = tally_level([N3_HIGH, N3_HIGH, N3_LOW], LevelSpec.N3_ALL, "xx")
        assert (counts.m, counts.g_above, counts.g_below, counts.ties) == (3, 2, 1, 0)

    def test_n4_linear_tie(self):
        counts = tally_level([LIN_TIE], LevelSpec.N4_LINEAR)
        assert counts.ties == 1 and counts.g_above == counts.g_below == 0

    def test_p_star_fraction(self):
        trees = [STAR_END] * 10 + [LIN_LOW] * 30
        counts = tally_level(trees, LevelSpec.N4_ALL_REAL)
        assert counts.p_star_real == Fraction(1, 4)
        assert counts.m == 40

    def test_p_star_only_for_real_level(self):
        assert tally_level([STAR_END], LevelSpec.N4_STAR).p_star_real is None

    def test_level_filters(self):
        trees = [N3_HIGH, STAR_END, LIN_LOW, path_tree(5), path_tree(2)]
        assert tally_level(trees, LevelSpec.N3_ALL).m == 1
        assert tally_level(trees, LevelSpec.N4_ALL_REAL).m == 2
        assert tally_level(trees, LevelSpec.N4_STAR).m == 1
        assert tally_level(trees, LevelSpec.N4_LINEAR).m == 1

    def test_empty_input(self):
        counts = tally_level([], LevelSpec.N3_ALL)
        assert counts.m == 0 and counts.p_star_real is None

    def test_no_ties_possible_at_n3_and_star_levels(self):
        # D_rla is unattainable there: 8/3 for n=3, and stars only reach 4 or 6
        trees = [N3_HIGH, N3_LOW, STAR_END, STAR_MID] * 25
        assert tally_level(trees, LevelSpec.N3_ALL).ties == 0
        assert tally_level(trees, LevelSpec.N4_STAR).ties == 0

    def test_unlabelled_and_labelled_share_filter(self):
        trees = [STAR_END, LIN_TIE, LIN_HIGH]
        for level in (LevelSpec.N4_UNLABELLED, LevelSpec.N4_LABELLED):
            counts = tally_level(trees, level)
            assert (counts.m, counts.g_above, counts.ties) == (3, 2, 1)

    @pytest.mark.parametrize("level", list(LevelSpec))
    def test_matches_direct_recount(self, level):
        trees = random_collection(7, 1, 200)["lang0"]
        counts = tally_level(trees, level, "lang0")
        target_n = 3 if level is LevelSpec.N3_ALL else 4
        eligible = [t for t in trees if t.n == target_n]
        if level is LevelSpec.N4_STAR:
            eligible = [t for t in eligible if classify(t) is TreeShape.STAR]
        if level is LevelSpec.N4_LINEAR:
            eligible = [t for t in eligible if classify(t) is TreeShape.LINEAR]
        threshold = Fraction(target_n ** 2 - 1, 3)
        assert counts.m == len(eligible)
        assert counts.g_above == sum(sum_of_distances(t) > threshold
                                     for t in eligible)
        assert counts.g_below == sum(sum_of_distances(t) < threshold
                                     for t in eligible)

    def test_counts_invariant_enforced(self):
        with pytest.raises(ValueError):
            LevelCounts(language="x", level=LevelSpec.N3_ALL, m=3,
                        g_above=1, g_below=1, ties=0)


class TestRunTests:
    def test_n3_all_above_eight_of_eight(self):
        counts = LevelCounts("xx", LevelSpec.N3_ALL, 8, 8, 0, 0)
        result = run_tests(counts, Direction.ABOVE)
        assert result.p == Fraction(2, 3)
        assert result.p_value == pytest.approx(float(Fraction(2, 3) ** 8),
                                               rel=1e-12)
        assert result.adequately_sampled  # m* is exactly 8

    def test_n4_star_four_of_four_undersampled(self):
        counts = LevelCounts("xx", LevelSpec.N4_STAR, 4, 4, 0, 0)
        result = run_tests(counts, Direction.ABOVE)
        assert result.p == Fraction(1, 2)
        assert result.p_value == pytest.approx(1 / 16, rel=1e-12)
        assert result.p_value > 0.05
        assert not result.adequately_sampled  # m* = 5

    def test_empty_tally_gives_unit_p(self):
        counts = LevelCounts("xx", LevelSpec.N4_LABELLED, 0, 0, 0, 0)
        result = run_tests(counts, Direction.BELOW)
        assert result.p_value == 1.0
        assert not result.adequately_sampled

    @pytest.mark.parametrize("level,expected", [
        (LevelSpec.N4_STAR, Fraction(1, 2)),
        (LevelSpec.N4_LINEAR, Fraction(1, 4)),
        (LevelSpec.N4_UNLABELLED, Fraction(3, 8)),
        (LevelSpec.N4_LABELLED, Fraction(5, 16)),
    ])
    def test_level_probabilities(self, level, expected):
        counts = LevelCounts("xx", level, 5, 3, 1, 1)
        for direction in Direction:
            assert run_tests(counts, direction).p == expected

    def test_real_level_uses_star_fraction(self):
        counts = LevelCounts("xx", LevelSpec.N4_ALL_REAL, 4, 2, 2, 0,
                             p_star_real=Fraction(1, 4))
        assert run_tests(counts, Direction.ABOVE).p == Fraction(5, 16)

    def test_direction_picks_g(self):
        counts = LevelCounts("xx", LevelSpec.N3_ALL, 10, 7, 3, 0)
        assert run_tests(counts, Direction.ABOVE).g == 7
        assert run_tests(counts, Direction.BELOW).g == 3

    def test_n3_direction_asymmetry(self):
        counts = LevelCounts("xx", LevelSpec.N3_ALL, 10, 7, 3, 0)
        assert run_tests(counts, Direction.ABOVE).p == Fraction(2, 3)
        assert run_tests(counts, Direction.BELOW).p == Fraction(1, 3)

    def test_noncrossing_probabilities(self):
        lin = LevelCounts("xx", LevelSpec.N4_LINEAR, 5, 3, 1, 1)
        assert run_tests(lin, Direction.ABOVE, noncrossing=True).p == Fraction(5, 8)
        assert run_tests(lin, Direction.BELOW, noncrossing=True).p == Fraction(3, 8)
        star = LevelCounts("xx", LevelSpec.N4_STAR, 5, 3, 2, 0)
        assert run_tests(star, Direction.ABOVE, noncrossing=True).p == Fraction(1, 2)
        n3 = LevelCounts("xx", LevelSpec.N3_ALL, 5, 3, 2, 0)
        assert run_tests(n3, Direction.ABOVE, noncrossing=True).p == Fraction(2, 3)

    def test_n3_minimum_sample_direction_dependent(self):
        counts = LevelCounts("xx", LevelSpec.N3_ALL, 5, 5, 0, 0)
        assert not run_tests(counts, Direction.ABOVE).adequately_sampled  # m*=8
        assert run_tests(counts, Direction.BELOW).adequately_sampled      # m*=3


class TestAnalyzeCollection:
    def test_planted_star_signal(self):
        treebanks = {f"L{i}": [STAR_END] * 50 for i in range(5)}
        report = analyze_collection(treebanks, levels=[LevelSpec.N4_STAR],
                                    directions=[Direction.ABOVE])
        (summary,) = report.summaries
        assert (summary.l0, summary.l, summary.f, summary.f_holm) == (5, 5, 5, 5)

    def test_single_language_holm_is_identity(self):
        report = analyze_collection({"xx": [N3_HIGH] * 10},
                                    levels=[LevelSpec.N3_ALL],
                                    directions=[Direction.ABOVE])
        (result,) = report.results
        assert result.p_holm == pytest.approx(result.p_value, rel=1e-12)
        assert result.significant == (result.p_value <= 0.05)

    def test_language_order_invariance(self):
        collection = random_collection(3)
        a = analyze_collection(collection)
        b = analyze_collection(dict(reversed(list(collection.items()))))
        assert a.summaries == b.summaries
        assert a.results == b.results

    def test_f_holm_never_exceeds_f_and_l0(self):
        for seed in range(5):
            report = analyze_collection(random_collection(seed))
            for s in report.summaries:
                assert s.f_holm <= s.f <= s.l <= s.l0

    def test_report_results_match_freestanding_run_tests(self):
        collection = random_collection(11)
        report = analyze_collection(collection, levels=[LevelSpec.N4_ALL_REAL],
                                    directions=[Direction.BELOW])
        for result in report.results:
            counts = tally_level(collection[result.language],
                                 LevelSpec.N4_ALL_REAL, result.language)
            fresh = run_tests(counts, Direction.BELOW)
            assert result.p_value == fresh.p_value
            assert result.m == fresh.m and result.g == fresh.g

    def test_families_attached_and_missing_warned(self, caplog):
        collection = {"aa": [N3_HIGH], "bb": [N3_LOW]}
        with caplog.at_level("WARNING", logger="ddmtest.pipeline"):
            report = analyze_collection(collection, families={"aa": "F1"},
                                        levels=[LevelSpec.N3_ALL],
                                        directions=[Direction.ABOVE])
        by_lang = {r.language: r.family for r in report.results}
        assert by_lang == {"aa": "F1", "bb": "Unknown"}
        assert "bb" in caplog.text

    def test_per_family_correction(self):
        # 40 above out of 40 at n4_star: p = (1/2)^40 per language
        treebanks = {"a1": [STAR_END] * 40, "a2": [STAR_END] * 40,
                     "a3": [STAR_END] * 40, "b1": [STAR_END] * 40}
        families = {"a1": "A", "a2": "A", "a3": "A", "b1": "B"}
        args = dict(families=families, levels=[LevelSpec.N4_STAR],
                    directions=[Direction.ABOVE])
        global_run = analyze_collection(treebanks, **args)
        per_family = analyze_collection(treebanks, per_family=True, **args)
        raw = {r.language: r.p_value for r in global_run.results}
        holm_global = {r.language: r.p_holm for r in global_run.results}
        holm_family = {r.language: r.p_holm for r in per_family.results}
        for lang in treebanks:
            assert holm_global[lang] == pytest.approx(4 * raw[lang], rel=1e-9)
        for lang in ("a1", "a2", "a3"):
            assert holm_family[lang] == pytest.approx(3 * raw[lang], rel=1e-9)
        assert holm_family["b1"] == pytest.approx(raw["b1"], rel=1e-9)

    def test_exclude_undersampled_from_correction(self):
        treebanks = {"big": [STAR_END] * 50, "tiny": [STAR_END] * 2}
        args = dict(levels=[LevelSpec.N4_STAR], directions=[Direction.ABOVE])
        kept = analyze_collection(treebanks, **args)
        dropped = analyze_collection(treebanks, include_undersampled=False,
                                     **args)
        assert {r.language: r.p_holm is None for r in dropped.results} == \
            {"big": False, "tiny": True}
        big_kept = next(r for r in kept.results if r.language == "big")
        big_dropped = next(r for r in dropped.results if r.language == "big")
        # Holm factor shrinks from 2 to 1 when the tiny language leaves
        assert big_dropped.p_holm == pytest.approx(big_kept.p_holm / 2, rel=1e-9)
        assert kept.summaries[0].l0 == dropped.summaries[0].l0 == 2

    def test_empty_collection(self):
        assert analyze_collection({}).is_empty
        assert analyze_collection({"xx": []}).is_empty

    def test_level_with_no_languages_keeps_zero_summary(self):
        report = analyze_collection({"xx": [path_tree(5)]},
                                    levels=[LevelSpec.N3_ALL],
                                    directions=[Direction.ABOVE])
        (summary,) = report.summaries
        assert (summary.l0, summary.l, summary.f, summary.f_holm) == (0, 0, 0, 0)
        assert report.results == []
        assert not report.is_empty

    def test_metadata_and_exclusions_passthrough(self):
        report = analyze_collection({"xx": [N3_HIGH]},
                                    exclusions={"cycle": 2},
                                    metadata={"seed": 7})
        assert report.exclusions == {"cycle": 2}
        assert report.metadata == {"seed": 7}


class TestEmitReport:
    def test_csv_empty_report_is_header_only(self):
        payload = emit_report(analyze_collection({}), "csv")
        lines = payload.decode().splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("collection,level,direction,language")
        assert lines[0].endswith("l0,l,f,f_H")

    def test_csv_has_language_and_summary_rows(self):
        report = analyze_collection({"xx": [N3_HIGH] * 10},
                                    collection="demo",
                                    levels=[LevelSpec.N3_ALL],
                                    directions=[Direction.ABOVE])
        lines = emit_report(report, "csv").decode().splitlines()
        assert len(lines) == 3
        assert lines[1].startswith("demo,n3_all,above,xx,Unknown,10,")
        assert lines[2].startswith("demo,n3_all,above,,")
        assert lines[2].endswith("1,1,1,1")

    def test_csv_p_used_is_fraction_text(self):
        report = analyze_collection({"xx": [STAR_END] * 3},
                                    levels=[LevelSpec.N4_LABELLED],
                                    directions=[Direction.ABOVE])
        lines = emit_report(report, "csv").decode().splitlines()
        assert ",5/16," in lines[1]

    def test_byte_determinism(self):
        collection = random_collection(5)
        for fmt in ("csv", "markdown", "json"):
            a = emit_report(analyze_collection(collection), fmt)
            b = emit_report(analyze_collection(collection), fmt)
            assert a == b

    def test_json_roundtrip(self):
        report = analyze_collection({"xx": [N3_HIGH] * 10, "yy": [N3_LOW] * 4},
                                    collection="demo",
                                    exclusions={"malformed": 1},
                                    metadata={"seed": 0})
        doc = json.loads(emit_report(report, "json"))
        assert doc["collection"] == "demo"
        assert doc["exclusions"] == {"malformed": 1}
        assert len(doc["results"]) == len(report.results)
        summary = doc["summaries"][0]
        assert set(summary) == {"level", "direction", "l0", "l", "f", "f_H"}

    def test_markdown_sections(self):
        report = analyze_collection({"xx": [N3_HIGH] * 3},
                                    exclusions={"cycle": 1})
        text = emit_report(report, "markdown").decode()
        assert "## Per-language tests" in text
        assert "## Level summaries" in text
        assert "## Excluded sentences" in text
        assert "| cycle | 1 |" in text

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            emit_report(analyze_collection({}), "xml")

    def test_neglog10_of_alpha_boundary(self):
        assert _neglog10(math.log10(0.05)) == 1.3

    def test_neglog10_of_unit_p(self):
        assert _neglog10(0.0) == 0.0
        assert str(_neglog10(0.0)) == "0.0"  # never -0.0

    def test_csv_quotes_awkward_names(self):
        report = analyze_collection({'we,ird "name"': [N3_HIGH]},
                                    levels=[LevelSpec.N3_ALL],
                                    directions=[Direction.ABOVE])
        lines = emit_report(report, "csv").decode().splitlines()
        assert '"we,ird ""name"""' in lines[1]


class TestLoadFamilies:
    def test_basic(self, tmp_path):
        path = tmp_path / "families.tsv"
        path.write_text("# comment\nJapanese\tJaponic\nKorean\tKoreanic\n\n",
                        encoding="utf-8")
        assert load_families(path) == {"Japanese": "Japonic",
                                       "Korean": "Koreanic"}

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "families.tsv"
        path.write_text("Japanese Japonic\n", encoding="utf-8")
        with pytest.raises(ValueError, match="line 1"):
            load_families(path)
