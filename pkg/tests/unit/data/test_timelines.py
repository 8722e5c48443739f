"""Unit tests for app/services/data/timelines.py"""


class TestBuildTimelines:
    """Tests for build_timelines function."""

    def test_click_times_sorted(self, make_record):
        """Should order events by timestamp and keep only click times."""
        from app.services.data import build_timelines

        records = [
            make_record(timestamp=10, click=True),
            make_record(timestamp=5, click=False),
            make_record(timestamp=20, click=True),
        ]

        timelines = build_timelines(records)

        timeline = timelines[("u1", "c1")]
        assert [r.timestamp for r in timeline.events] == [5, 10, 20]
        assert timeline.click_times == (10, 20)

    def test_empty_input(self):
        """Should return an empty map."""
        from app.services.data import build_timelines

        assert build_timelines([]) == {}

    def test_every_record_in_one_timeline(self, make_record):
        """Should key timelines by (user, campaign)."""
        from app.services.data import build_timelines

        records = [
            make_record(user_id="u1", campaign_id="c1"),
            make_record(user_id="u1", campaign_id="c2"),
            make_record(user_id="u2", campaign_id="c1"),
        ]

        timelines = build_timelines(records)

        assert sorted(timelines) == [("u1", "c1"), ("u1", "c2"), ("u2", "c1")]
        assert sum(len(t.events) for t in timelines.values()) == 3

    def test_ties_keep_input_order(self, make_record):
        """Should break timestamp ties by input order."""
        from app.services.data import build_timelines

        first = make_record(timestamp=5)
        second = make_record(timestamp=5)

        timeline = build_timelines([first, second])[("u1", "c1")]

        assert timeline.events[0] is first
        assert timeline.events[1] is second


class TestTimeSinceLastClick:
    """Tests for time_since_last_click function."""

    def test_gap_to_previous_click(self, make_record):
        """Should measure from the latest click strictly before t."""
        from app.services.data import build_timelines, time_since_last_click

        timeline = build_timelines([make_record(timestamp=10, click=True), make_record(timestamp=20, click=True)])[
            ("u1", "c1")
        ]

        assert time_since_last_click(timeline, 25) == 5
        assert time_since_last_click(timeline, 15) == 5

    def test_no_previous_click(self, make_record):
        """Should return None when no click precedes t."""
        from app.services.data import build_timelines, time_since_last_click

        timeline = build_timelines([make_record(timestamp=10, click=True)])[("u1", "c1")]

        assert time_since_last_click(timeline, 5) is None

    def test_click_at_same_time_excluded(self, make_record):
        """Should not count a click at exactly t."""
        from app.services.data import build_timelines, time_since_last_click

        timeline = build_timelines([make_record(timestamp=3, click=True), make_record(timestamp=10, click=True)])[
            ("u1", "c1")
        ]

        assert time_since_last_click(timeline, 10) == 7


class TestConversionGroups:
    """Tests for group_conversions and ConversionIndex."""

    def test_group_collects_clicks(self, three_click_conversion):
        """Should group the three clicks under one attributed conversion."""
        from app.services.data import build_timelines, group_conversions

        timeline = build_timelines(three_click_conversion)[("u1", "c1")]

        groups = group_conversions(timeline)

        assert len(groups) == 1
        assert groups[0].attributed is True
        assert groups[0].click_times == [0, 110904, 221808]

    def test_window_drops_old_clicks(self, three_click_conversion):
        """Should drop clicks older than the window."""
        from app.services.data import build_timelines, group_conversions

        timeline = build_timelines(three_click_conversion)[("u1", "c1")]

        groups = group_conversions(timeline, window=120000)

        assert groups[0].click_times == [110904, 221808]

    def test_index_lookup(self, three_click_conversion):
        """Should resolve each click to its group and position."""
        from app.services.data import ConversionIndex, build_timelines

        index = ConversionIndex(build_timelines(three_click_conversion))

        group, position = index.lookup(three_click_conversion[1])
        assert position == 1
        assert len(group.clicks) == 3
        assert index.lookup(three_click_conversion[3]) is None


class TestExtractAttributionSamples:
    """Tests for extract_attribution_samples function."""

    def test_one_sample_per_conversion(self, three_click_conversion):
        """Should measure the delay from the last click only."""
        from app.services.data import build_timelines, extract_attribution_samples

        result = extract_attribution_samples(build_timelines(three_click_conversion))

        assert len(result.samples) == 1
        assert result.samples[0].delta == 1000
        assert result.samples[0].attributed is True
        assert result.samples[0].campaign_id == "c1"
        assert result.samples[0].day == (2 * 110904 + 1000) // 86400

    def test_skips_non_positive_delay(self, make_record):
        """Should skip and count a conversion logged at its click time."""
        from app.services.data import build_timelines, extract_attribution_samples

        record = make_record(
            timestamp=100, click=True, conversion=True, click_pos=0, click_nb=1, conversion_timestamp=100
        )

        result = extract_attribution_samples(build_timelines([record]))

        assert result.samples == []
        assert result.skipped_non_positive == 1

    def test_counts_conversions_without_click(self, make_record):
        """Should count unclicked conversions without producing a sample."""
        from app.services.data import build_timelines, extract_attribution_samples

        record = make_record(timestamp=100, conversion=True, conversion_timestamp=200)

        result = extract_attribution_samples(build_timelines([record]))

        assert result.samples == []
        assert result.conversions_without_click == 1
