import io

import pytest
from hypothesis import given, strategies as st

from hapticlab.assessment import (EmptyGroupError, GainReport, ScoreParseError,
                                  ScoreRecord, UndefinedGainError, group_gain,
                                  load_scores, normalized_gain)


class TestNormalizedGain:
    def test_published_group_value(self):
        # 9.1 / 50
        assert normalized_gain(50.0, 59.1) == pytest.approx(0.182, abs=1e-12)

    def test_no_change_is_zero(self):
        for t in (0.0, 25.0, 99.9):
            assert normalized_gain(t, t) == 0.0

    def test_perfect_post_test(self):
        assert normalized_gain(40.0, 100.0) == 1.0

    def test_negative_gain(self):
        # -2 / 20
        assert normalized_gain(80.0, 78.0) == pytest.approx(-0.1, abs=1e-12)

    def test_ceiling_undefined(self):
        with pytest.raises(UndefinedGainError):
            normalized_gain(100.0, 100.0)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            normalized_gain(-1.0, 50.0)
        with pytest.raises(ValueError):
            normalized_gain(50.0, 101.0)

    @given(st.floats(0.0, 99.0), st.floats(0.0, 100.0))
    def test_never_exceeds_one(self, t2, t3):
        g = normalized_gain(t2, t3)
        assert g <= 1.0
        assert (g == 1.0) == (t3 == 100.0)

    @given(st.floats(0.0, 99.0), st.floats(0.0, 99.0), st.floats(0.01, 1.0))
    def test_monotone_in_post_test(self, t2, t3, bump):
        if t3 + bump > 100.0:
            return
        assert normalized_gain(t2, t3 + bump) > normalized_gain(t2, t3)

    @given(st.floats(0.0, 99.9))
    def test_ceiling_identity(self, t2):
        assert normalized_gain(t2, 100.0) == 1.0


class TestGroupGain:
    def rec(self, student, group, t2, t3):
        return ScoreRecord(student, group, t2, t3)

    def test_single_student(self):
        out = group_gain([self.rec("s1", "A", 50.0, 59.1)])
        assert out["A"].mean_gain == pytest.approx(0.182, abs=1e-12)
        assert out["A"].n == 1

    def test_symmetric_gains_average_to_zero(self):
        recs = [self.rec("a", "G", 50.0, 60.0),   # gain 0.2
                self.rec("b", "G", 50.0, 40.0)]   # gain -0.2
        assert group_gain(recs)["G"].mean_gain == pytest.approx(0.0, abs=1e-12)

    def test_ceiling_student_excluded_and_reported(self):
        recs = [self.rec("top", "A", 100.0, 100.0),
                self.rec("s", "A", 50.0, 59.1)]
        rep = group_gain(recs)["A"]
        assert rep.mean_gain == pytest.approx(0.182, abs=1e-12)
        assert rep.excluded == ["top"]
        assert rep.n == 1

    def test_all_ceiling_group_errors(self):
        with pytest.raises(EmptyGroupError):
            group_gain([self.rec("t", "A", 100.0, 100.0)])

    def test_no_records_errors(self):
        with pytest.raises(EmptyGroupError):
            group_gain([])

    def test_group_mean_aggregation(self):
        recs = [self.rec("a", "A", 40.0, 70.0), self.rec("b", "A", 60.0, 70.0)]
        rep = group_gain(recs, aggregation="group-mean")["A"]
        # gain(mean2=50, mean3=70) = 20/50
        assert rep.mean_gain == pytest.approx(0.4, abs=1e-12)
        assert rep.aggregation == "group-mean"

    def test_unknown_aggregation(self):
        with pytest.raises(ValueError):
            group_gain([self.rec("a", "A", 50.0, 60.0)], aggregation="median")

    def test_multiple_groups_sorted(self):
        recs = [self.rec("1", "B", 80.0, 78.0), self.rec("2", "A", 50.0, 59.1)]
        out = group_gain(recs)
        assert list(out.keys()) == ["A", "B"]
        assert out["B"].mean_gain == pytest.approx(-0.1, abs=1e-12)


CSV_OK = "student,group,test2,test3\ns1,A,50,59.1\ns2,B,80,78\n"


class TestLoadScores:
    def test_valid_rows(self):
        recs = load_scores(io.StringIO(CSV_OK))
        assert len(recs) == 2
        assert recs[0] == ScoreRecord("s1", "A", 50.0, 59.1)

    def test_out_of_range_cites_line(self):
        bad = "student,group,test2,test3\ns1,A,50,105\n"
        with pytest.raises(ScoreParseError, match="line 2"):
            load_scores(io.StringIO(bad))

    def test_malformed_row_cites_line(self):
        bad = "student,group,test2,test3\ns1,A,50,59\ns2,B,eighty,78\n"
        with pytest.raises(ScoreParseError, match="line 3"):
            load_scores(io.StringIO(bad))

    def test_rejection_is_atomic_and_collects_all(self):
        bad = "student,group,test2,test3\ns1,A,50,105\ns2,B,eighty,78\n"
        with pytest.raises(ScoreParseError) as exc:
            load_scores(io.StringIO(bad))
        assert len(exc.value.problems) == 2

    def test_empty_input(self):
        with pytest.raises(ScoreParseError, match="empty"):
            load_scores(io.StringIO(""))

    def test_header_required(self):
        with pytest.raises(ScoreParseError, match="header"):
            load_scores(io.StringIO("a,b,c,d\n1,2,3,4\n"))

    def test_header_only_rejected(self):
        with pytest.raises(ScoreParseError, match="no data"):
            load_scores(io.StringIO("student,group,test2,test3\n"))

    def test_file_path(self, tmp_path):
        p = tmp_path / "scores.csv"
        p.write_text(CSV_OK)
        assert len(load_scores(str(p))) == 2
