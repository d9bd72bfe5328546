import pytest
from scipy import stats

from src.acts.grammar import parse_act
from src.harness.evaluation import compare_tables
from src.harness.episode_log import SYSTEM, EpisodeLog, TurnRecord
from src.harness.metrics import (
    CSV_HEADER,
    Aggregate,
    MetricsRow,
    MetricsTable,
    StatisticsError,
    Verdict,
    format_table,
    proportion_test,
    relation_act_rate,
    rows_from_logs,
    significance,
    welch_test,
)

ORDER = ("CamHotels", "CamRestaurants")


def make_log(episode, success=(True, True), turns=(5, 4), relation_act=False, order=ORDER):
    log = EpisodeLog(episode, "test", 0, "abc", order)
    if relation_act:
        log.add(
            TurnRecord(
                2,
                SYSTEM,
                parse_act("confirm(CamHotels#area=CamRestaurants#area)"),
                "CamRestaurants",
                ("select_relation_CamHotels-CamRestaurants", "confirm_rel_area2area"),
            )
        )
    for object_id, won, count in zip(order, success, turns):
        log.success[object_id] = won
        log.turn_counts[object_id] = count
        log.returns[object_id] = 30.0 * won - count
    return log


def make_row(seed=0, policy="cedm", r=0.5, reward=20.0, success=0.9, n=100, position=2, **overrides):
    data = dict(
        experiment="exp1",
        env="env1",
        r=r,
        policy=policy,
        seed=seed,
        object_position=position,
        object_id="CamRestaurants",
        reward_mean=reward,
        success_rate=success,
        n=n,
        relation_act_rate=0.0,
    )
    data.update(overrides)
    return MetricsRow(**data)


def aggregate(policy, rewards, successes=90, n=100, r=0.5, object_id="CamRestaurants"):
    return Aggregate("exp1", "env1", r, policy, 2, object_id, tuple(rewards), successes, n, 0.0)


class TestRows:
    def test_relation_act_rate(self):
        logs = [make_log(0, relation_act=True)] + [make_log(i) for i in range(1, 4)]
        assert relation_act_rate(logs) == 0.25
        assert relation_act_rate([]) == 0.0

    def test_rows_from_logs(self, make_config):
        config = make_config(policies={"CamHotels": "handcrafted", "CamRestaurants": "cedm"})
        logs = [
            make_log(0, success=(True, False), turns=(5, 6)),
            make_log(1, success=(True, True), turns=(3, 4), relation_act=True),
            make_log(2, order=ORDER[::-1], success=(True, True), turns=(2, 2)),
        ]
        rows = rows_from_logs(config, 7, logs)
        assert [(row.object_position, row.object_id) for row in rows] == [
            (1, "CamHotels"),
            (1, "CamRestaurants"),
            (2, "CamHotels"),
            (2, "CamRestaurants"),
        ]
        second = rows[3]
        assert second.policy == "cedm"
        assert second.seed == 7
        assert second.n == 2
        assert second.success_rate == 0.5
        assert second.reward_mean == pytest.approx(((0 - 6) + (30 - 4)) / 2)
        assert second.relation_act_rate == 0.5
        assert second.env == "env1"


class TestMetricsTable:
    def test_csv_round_trip(self, tmp_path):
        table = MetricsTable([make_row(seed=0), make_row(seed=1, reward=18.5, success=0.85)])
        path = table.to_csv(tmp_path / "out" / "metrics.csv")
        assert path.read_text().splitlines()[0] == ",".join(CSV_HEADER)
        assert MetricsTable.from_csv(path).rows == table.rows

    def test_bad_header(self, tmp_path):
        path = tmp_path / "metrics.csv"
        path.write_text("experiment,env\nexp1,env1\n")
        with pytest.raises(StatisticsError):
            MetricsTable.from_csv(path)

    def test_aggregate_over_seeds(self):
        table = MetricsTable(
            [
                make_row(seed=0, reward=20.0, success=0.9, n=10),
                make_row(seed=1, reward=10.0, success=0.5, n=10),
                make_row(seed=0, policy="baseline", reward=5.0, success=0.2, n=10),
            ]
        )
        aggregates = table.aggregate()
        assert [a.policy for a in aggregates] == ["baseline", "cedm"]
        cedm = aggregates[1]
        assert cedm.seed_rewards == (20.0, 10.0)
        assert cedm.reward_mean == 15.0
        assert cedm.successes == 14
        assert cedm.n == 20
        assert cedm.success_rate == pytest.approx(0.7)
        assert cedm.reward_ci == pytest.approx(stats.t.ppf(0.975, 1) * 5.0)

    def test_objects_at_the_same_position_stay_apart(self):
        table = MetricsTable(
            [
                make_row(seed=0, reward=20.0, success=0.9, n=10, object_id="CamRestaurants"),
                make_row(seed=0, reward=10.0, success=0.6, n=10, object_id="CamHotels"),
                make_row(seed=1, reward=22.0, success=1.0, n=10, object_id="CamRestaurants"),
            ]
        )
        hotel, restaurant = table.aggregate()
        assert (hotel.object_position, hotel.object_id) == (2, "CamHotels")
        assert hotel.seed_rewards == (10.0,)
        assert hotel.successes == 6
        assert restaurant.object_id == "CamRestaurants"
        assert restaurant.seed_rewards == (20.0, 22.0)
        assert restaurant.success_rate == pytest.approx(0.95)
        assert hotel.key != restaurant.key

    def test_single_seed_has_no_interval(self):
        assert aggregate("cedm", [12.0]).reward_ci == 0.0


class TestSignificance:
    def test_welch_matches_scipy(self):
        a, b = [1.0, 2.0, 3.0, 4.0], [2.0, 3.0, 5.0, 7.0]
        expected = stats.ttest_ind(a, b, equal_var=False)
        result = welch_test(a, b)
        assert result.statistic == pytest.approx(expected.statistic)
        assert result.p_value == pytest.approx(expected.pvalue)
        assert result.verdict == Verdict.NO_DIFFERENCE

    def test_welch_clear_difference(self):
        result = welch_test([20.1, 20.3, 19.9, 20.2], [10.0, 10.4, 9.8, 10.1])
        assert result.verdict == Verdict.A_BETTER
        assert welch_test([10.0, 10.4, 9.8, 10.1], [20.1, 20.3, 19.9, 20.2]).verdict == Verdict.B_BETTER

    def test_welch_needs_two_samples(self):
        with pytest.raises(StatisticsError):
            welch_test([1.0], [1.0, 2.0])

    def test_welch_zero_variance(self):
        assert welch_test([3.0, 3.0], [3.0, 3.0]).verdict == Verdict.NO_DIFFERENCE
        assert welch_test([3.0, 3.0], [3.0, 3.0]).p_value == 1.0
        different = welch_test([4.0, 4.0], [3.0, 3.0])
        assert different.verdict == Verdict.A_BETTER
        assert different.p_value == 0.0

    def test_proportions(self):
        result = proportion_test(90, 100, 50, 100)
        assert result.statistic == pytest.approx(6.172, abs=1e-3)
        assert result.p_value < 1e-6
        assert result.verdict == Verdict.A_BETTER

    def test_close_proportions(self):
        assert proportion_test(50, 100, 52, 100).verdict == Verdict.NO_DIFFERENCE

    def test_proportions_need_trials(self):
        with pytest.raises(StatisticsError):
            proportion_test(0, 0, 5, 10)

    def test_pooled_extremes(self):
        assert proportion_test(10, 10, 20, 20).verdict == Verdict.NO_DIFFERENCE
        assert proportion_test(0, 10, 0, 20).p_value == 1.0

    def test_significance_pairs_both_tests(self):
        comparison = significance(aggregate("cedm", [20.0, 21.0, 20.5]), aggregate("baseline", [10.0, 11.0, 10.5], 50))
        assert comparison.reward.verdict == Verdict.A_BETTER
        assert comparison.success.verdict == Verdict.A_BETTER


class TestFormatTable:
    def test_markers_and_footer(self):
        aggregates = [
            aggregate("cedm", [20.0, 21.0, 20.5], r=0.5),
            aggregate("baseline", [10.0, 11.0, 10.5], r=0.5),
            aggregate("cedm", [15.0, 16.0, 15.5], r=0.0),
            aggregate("baseline", [15.2, 15.8, 15.4], r=0.0),
        ]
        lines = format_table(aggregates).splitlines()
        assert lines[0] == "exp1 env1 object 2"
        assert lines[1].split() == ["r", "object", "baseline", "cedm"]
        assert lines[2].split()[:2] == ["0.00", "CamRestaurants"]
        assert lines[2].count("~") == 2
        assert lines[3].startswith("0.50")
        assert lines[3].endswith("20.5 / 90.0%*")
        assert "*" not in lines[3].split("%")[0]
        assert lines[-1] == "* significantly better reward (p < 0.05), ~ no significant difference"

    def test_position_filter(self):
        other = Aggregate("exp1", "env1", 0.5, "cedm", 1, "CamHotels", (20.0,), 9, 10, 0.0)
        assert "object 1" not in format_table([other])
        assert "object 1" in format_table([other], position=None)

    def test_missing_cell(self):
        table = format_table([aggregate("cedm", [20.0], r=0.5), aggregate("baseline", [10.0], r=0.0)])
        assert "-" in table.splitlines()[2]

    def test_object_column(self):
        table = format_table(
            [
                aggregate("cedm", [20.0, 21.0], successes=88, object_id="CamRestaurants"),
                aggregate("cedm", [18.0, 17.0], successes=79, object_id="CamHotels"),
            ]
        )
        lines = table.splitlines()
        assert lines[2].split() == ["0.50", "CamHotels", "17.5", "/", "79.0%"]
        assert lines[3].split() == ["0.50", "CamRestaurants", "20.5", "/", "88.0%"]


class TestCompareTables:
    @staticmethod
    def alternating(reward, success):
        return MetricsTable(
            make_row(seed=seed, reward=reward + seed, success=success, object_id=object_id, policy=policy)
            for seed in (0, 1)
            for object_id, policy in (("CamHotels", "cedm"), ("CamRestaurants", "cedm"))
        )

    def test_objects_at_the_same_position_are_compared_separately(self):
        lines = compare_tables(self.alternating(20.0, 0.9), self.alternating(10.0, 0.5), "cedm", "baseline")
        assert [line.split(":")[0] for line in lines.splitlines()] == [
            "object 2 CamHotels",
            "object 2 CamRestaurants",
        ]
        assert all("reward cedm better" in line for line in lines.splitlines())

    def test_mixed_runs_are_rejected(self):
        table = MetricsTable([make_row(seed=0), make_row(seed=0, policy="baseline")])
        with pytest.raises(StatisticsError, match="several runs"):
            compare_tables(table, table)
