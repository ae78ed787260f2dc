import pytest

from conftest import TABLE2_POLICY_TEXT
from pribom.diagnostics import Diagnostics
from pribom.errors import DocumentError
from pribom.model import (LabelDeclaration, PermissionFinding, PolicySegment,
                          WidgetEntry, WidgetIdentifier)
from pribom.notice import (KeywordLexicon, TaxonomyMap, attach, parse_label,
                           phrase_similarity, replay_evidence, segment,
                           split_policy, split_sentences)


@pytest.fixture(scope="module")
def lexicon():
    return KeywordLexicon.load()


@pytest.fixture(scope="module")
def taxonomy():
    return TaxonomyMap.load()


class TestSplitPolicy:
    def test_heading_and_two_sentences(self):
        policy = split_policy("Location Data\nWe may collect your geo-location. "
                              "We store it.")
        assert len(policy.paragraphs) == 1
        paragraph = policy.paragraphs[0]
        assert paragraph.heading == "Location Data"
        assert [s.text for s in paragraph.sentences] == [
            "We may collect your geo-location.", "We store it."]

    def test_sentence_offsets_point_into_source(self):
        raw = "Location Data\nWe may collect your geo-location. We store it."
        policy = split_policy(raw)
        previous_end = -1
        for sentence in policy.paragraphs[0].sentences:
            assert raw[sentence.start:sentence.end] == sentence.text
            assert sentence.start > previous_end
            previous_end = sentence.end

    def test_html_heading(self):
        policy = split_policy("<h2>Contacts</h2><p>We sync your address book "
                              "to our servers.</p>")
        assert policy.paragraphs[0].heading == "Contacts"
        assert policy.paragraphs[0].sentences[0].text == \
            "We sync your address book to our servers."

    def test_html_offsets_point_into_source(self):
        raw = "<h2>Contacts</h2>\n<p>We sync your address book.</p>"
        policy = split_policy(raw)
        sentence = policy.paragraphs[0].sentences[0]
        assert raw[sentence.start:sentence.end] == sentence.text

    def test_abbreviation_guard(self):
        sentences = split_sentences("We use identifiers, e.g. location data, "
                                    "for analytics.")
        assert len(sentences) == 1

    def test_initial_guard(self):
        sentences = split_sentences("Dr. J. Smith reviews our policy yearly.")
        assert len(sentences) == 1

    def test_empty_input_is_an_error(self):
        with pytest.raises(DocumentError, match="empty"):
            split_policy("   \n ")

    def test_offsets_within_source_and_non_overlapping(self):
        from hypothesis import given, settings
        from hypothesis import strategies as st

        @settings(max_examples=150, deadline=None)
        @given(st.text(
            alphabet=st.sampled_from(list(
                "abcdefg .!?\n\te.g,ABC'\"()-:;0123456789")),
            min_size=1, max_size=300))
        def run(raw):
            if not raw.strip():
                return
            policy = split_policy(raw)
            seen_end = -1
            for paragraph in policy.paragraphs:
                for sentence in paragraph.sentences:
                    assert 0 <= sentence.start <= sentence.end <= len(raw)
                    assert raw[sentence.start:sentence.end] == sentence.text
                    assert sentence.start >= seen_end  # non-overlapping
                    seen_end = sentence.end

        run()


class TestSegment:
    def test_worked_example_sentence_matches_location(self, lexicon):
        policy = split_policy("Location Data\n" + TABLE2_POLICY_TEXT)
        segments = segment(policy, lexicon)
        location = [s for s in segments if s.data_type == "Location"]
        assert len(location) == 1
        assert location[0].text == TABLE2_POLICY_TEXT
        assert "keyword:geo-location" in location[0].evidence

    def test_sentence_without_category_keywords_matches_nothing(self, lexicon):
        policy = split_policy("General\nWe never sell your data.")
        assert segment(policy, lexicon) == []

    def test_phrase_rule_fires_on_address_book(self, lexicon):
        # Hand computation: alternative "address book" has token set
        # {address, book}; the sentence window [address, book] gives
        # Jaccard 2/2 = 1.0 >= 0.5.
        assert phrase_similarity(
            "contact list / address book",
            ["we", "access", "your", "address", "book"]) == 1.0
        policy = split_policy("Your Data\nwe access your address book")
        segments = segment(policy, lexicon)
        contacts = [s for s in segments if s.data_type == "Contacts"]
        assert len(contacts) == 1
        assert any(e.startswith("phrase:") or e.startswith("keyword:")
                   for e in contacts[0].evidence)

    def test_phrase_similarity_below_threshold_does_not_fire(self):
        # {contact, list} vs best window of [we, sell, widgets]: 0 overlap.
        assert phrase_similarity("contact list",
                                 ["we", "sell", "widgets"]) == 0.0

    def test_heading_rule_tags_whole_paragraph(self, lexicon):
        policy = split_policy("Location\nWe do things with it. More details "
                              "follow here.")
        segments = segment(policy, lexicon)
        location = [s for s in segments if s.data_type == "Location"]
        assert len(location) == 2
        assert all("heading:location" in s.evidence for s in location)

    def test_sentence_may_match_multiple_data_types(self, lexicon):
        policy = split_policy("Your Data\nWe collect your GPS position and "
                              "read your contacts.")
        segments = segment(policy, lexicon)
        types = {s.data_type for s in segments}
        assert {"Location", "Contacts"} <= types

    def test_every_evidence_replays(self, lexicon):
        policy = split_policy(
            "Location\nwith your permission we may collect your geo-location "
            "information. We access your address book.\n\nAudio\nWe record "
            "audio with the microphone.")
        for seg in segment(policy, lexicon):
            heading = policy.paragraphs[seg.paragraph_index].heading
            assert replay_evidence(seg, lexicon, heading)

    def test_stable_under_paragraph_reordering(self, lexicon):
        a = "Location Data\nWe collect your GPS position."
        b = "Contacts\nWe read your address book."
        first = segment(split_policy(a + "\n\n" + b), lexicon)
        second = segment(split_policy(b + "\n\n" + a), lexicon)

        def key(s):
            return (s.data_type, s.text, s.evidence)

        assert sorted(map(key, first)) == sorted(map(key, second))


class TestParseLabel:
    def test_worked_example_label(self, taxonomy):
        rows = [{"label_name": "Approximate location", "collected": True,
                 "optional": True,
                 "purposes": ["App functionality", "Analytics",
                              "Advertising or marketing"]}]
        declarations = parse_label(rows, taxonomy)
        assert len(declarations) == 1
        declaration = declarations[0]
        assert declaration.data_type == "Location"
        assert declaration.optional_flag is True
        assert declaration.purposes == ("App functionality", "Analytics",
                                        "Advertising or marketing")

    def test_unmapped_taxonomy_name_is_diagnostic_only(self, taxonomy):
        diags = Diagnostics()
        rows = [{"label_name": "Crash logs", "collected": True,
                 "optional": False, "purposes": ["Analytics"]}]
        assert parse_label(rows, taxonomy, diags) == []
        assert any("no category mapping" in m for m in diags.messages())

    def test_uncollected_rows_skipped(self, taxonomy):
        rows = [{"label_name": "Contacts", "collected": False,
                 "optional": False, "purposes": []}]
        assert parse_label(rows, taxonomy) == []

    def test_unknown_name_is_a_warning(self, taxonomy):
        diags = Diagnostics()
        rows = [{"label_name": "Quantum state", "collected": True,
                 "purposes": ["Science"]}]
        assert parse_label(rows, taxonomy, diags) == []
        assert any("not in the documented" in m for m in diags.messages())

    def test_malformed_row_is_an_error(self, taxonomy):
        with pytest.raises(DocumentError, match="malformed"):
            parse_label([{"collected": True}], taxonomy)
        with pytest.raises(DocumentError, match="JSON list"):
            parse_label({"label_name": "Contacts"}, taxonomy)

    def test_output_never_exceeds_input_rows(self, taxonomy):
        rows = [{"label_name": name, "collected": True, "purposes": ["x"]}
                for name in ("Approximate location", "Precise location",
                             "Contacts", "Crash logs")]
        assert len(parse_label(rows, taxonomy)) <= len(rows)


def _entry(widget_id, data_type=None):
    findings = ()
    if data_type:
        findings = (PermissionFinding(
            permission="android.permission.ACCESS_COARSE_LOCATION",
            data_type=data_type,
            method_path="Landroid/location/LocationManager;-"
                        "getLastKnownLocation-(Ljava/lang/String;)"
                        "Landroid/location/Location;",
            min_api_level=1),)
    return WidgetEntry(
        identifier=WidgetIdentifier("android.widget.Button", widget_id, "b"),
        findings=findings)


class TestAttach:
    SEGMENT = PolicySegment("Location", TABLE2_POLICY_TEXT, 0, 0,
                            ("keyword:geo-location",))
    LABEL = LabelDeclaration("Approximate location", "Location", True,
                             ("App functionality",))
    CONTACTS_SEGMENT = PolicySegment("Contacts", "we read your address book",
                                     1, 0, ("keyword:address book",))

    def test_matching_disclosures_attach(self):
        entries = attach([_entry(1, "Location")], [self.SEGMENT], [self.LABEL])
        assert entries[0].policy_segments == (self.SEGMENT,)
        assert entries[0].label_declarations == (self.LABEL,)

    def test_widget_without_findings_stays_empty(self):
        entries = attach([_entry(1)], [self.SEGMENT], [self.LABEL])
        assert entries[0].policy_segments == ()
        assert entries[0].label_declarations == ()

    def test_unmatched_segment_attaches_nowhere(self):
        entries = attach([_entry(1, "Location")], [self.CONTACTS_SEGMENT], [])
        assert entries[0].policy_segments == ()

    def test_attach_is_idempotent(self):
        once = attach([_entry(1, "Location")], [self.SEGMENT], [self.LABEL])
        twice = attach(once, [self.SEGMENT], [self.LABEL])
        assert once == twice

    def test_attach_is_order_insensitive(self):
        entries = [_entry(1, "Location"), _entry(2, "Contacts"), _entry(3)]
        forward = attach(entries, [self.SEGMENT, self.CONTACTS_SEGMENT],
                         [self.LABEL])
        backward = attach(list(reversed(entries)),
                          [self.SEGMENT, self.CONTACTS_SEGMENT], [self.LABEL])
        assert sorted(forward, key=lambda e: e.widget_id) \
            == sorted(backward, key=lambda e: e.widget_id)

    def test_unattached_segment_surfaces_in_check_as_over_disclosure(self):
        # No widget collects Contacts, so the Contacts segment attaches
        # nowhere; checking with the full segment set still reports it.
        from pribom.model import PriBomDocument
        from pribom.reports import check
        entries = attach([_entry(1, "Location")],
                         [self.SEGMENT, self.CONTACTS_SEGMENT], [self.LABEL])
        assert all(s.data_type != "Contacts"
                   for e in entries for s in e.policy_segments)
        doc = PriBomDocument(app_package="com.example.app",
                             app_version_name="1.0", app_version_code=1,
                             generated_at="2024-01-01T00:00:00Z",
                             entries=tuple(entries))
        segment_types = {s.data_type
                         for s in (self.SEGMENT, self.CONTACTS_SEGMENT)}
        report = check(doc, extra_policy_types=segment_types)
        assert report.policy.over_disclosed == ("Contacts",)
        assert report.exit_status == 0
