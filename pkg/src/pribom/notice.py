"""Privacy notice analysis: policy segmentation and label parsing.

Policies arrive as plain text or simple HTML. Text is split into
paragraphs with optional headings and into sentences with source
offsets; each sentence is then matched against the per-category
lexicon by three rules, in order:

  heading  - the paragraph heading contains a heading keyword
  keyword  - the sentence contains a sentence keyword (word boundary)
  phrase   - token-set Jaccard between a lexicon phrase and some
             equally sized window of the sentence reaches the
             similarity threshold ("/" in a phrase separates
             alternatives scored independently)

Every match records replayable evidence ("rule:matched-string").
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from html.parser import HTMLParser

from . import assets
from .diagnostics import Diagnostics
from .errors import DocumentError, PribomError
from .model import DATA_TYPES, LabelDeclaration, PolicySegment, WidgetEntry

DEFAULT_SIMILARITY_THRESHOLD = 0.5

_ABBREVIATIONS = {
    "e.g", "i.e", "etc", "mr", "mrs", "ms", "dr", "inc", "ltd", "co",
    "corp", "vs", "approx", "dept", "est", "jr", "sr", "st", "no", "u.s",
    "u.k",
}

_HEADING_STOPWORDS = {
    "a", "an", "and", "as", "at", "but", "by", "for", "in", "of", "on",
    "or", "the", "to", "with", "we", "your", "our", "you",
}

_TOKEN_RE = re.compile(r"[a-z0-9]+(?:[-'][a-z0-9]+)*")


@dataclass(frozen=True)
class Sentence:
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class Paragraph:
    heading: str | None
    sentences: tuple[Sentence, ...]


@dataclass(frozen=True)
class PolicyText:
    paragraphs: tuple[Paragraph, ...]


@dataclass(frozen=True)
class KeywordLexicon:
    categories: dict  # data type -> {"headings": [...], "keywords": [...], "phrases": [...]}

    @classmethod
    def load(cls, override=None) -> "KeywordLexicon":
        raw = assets.load_json_asset(assets.LEXICON, override)
        for data_type, entry in raw.items():
            if data_type not in DATA_TYPES:
                raise PribomError(f"lexicon: {data_type!r} is not one of the "
                                  "ten data type categories")
            if not (entry.get("headings") and entry.get("keywords")):
                raise PribomError(f"lexicon: {data_type} must list headings "
                                  "and keywords")
        missing = set(DATA_TYPES) - set(raw)
        if missing:
            raise PribomError(f"lexicon: missing categories {sorted(missing)}")
        return cls(categories=raw)


def _looks_like_heading(line: str) -> bool:
    stripped = line.strip()
    if not stripped or len(stripped) > 64:
        return False
    if stripped[-1] in ".!?;:,":
        return False
    words = stripped.split()
    if len(words) > 8:
        return False
    for word in words:
        alpha = next((ch for ch in word if ch.isalpha()), None)
        if alpha is None:
            continue
        if not alpha.isupper() and word.lower() not in _HEADING_STOPWORDS:
            return False
    return True


def split_sentences(text: str, base_offset: int = 0) -> list[Sentence]:
    """Terminal-punctuation split with an abbreviation guard."""
    sentences: list[Sentence] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in ".!?":
            # include any run of closing punctuation
            j = i
            while j + 1 < n and text[j + 1] in ".!?\"')":
                j += 1
            word = text[max(0, start):i].rstrip().rsplit(None, 1)
            last = word[-1].lower().lstrip("(\"'") if word else ""
            preceding = last.rstrip(".")
            is_abbrev = (ch == "." and (preceding in _ABBREVIATIONS
                                        or (len(preceding) == 1
                                            and preceding.isalpha())))
            at_boundary = j + 1 >= n or text[j + 1].isspace()
            if at_boundary and not is_abbrev:
                raw = text[start:j + 1]
                lead = len(raw) - len(raw.lstrip())
                stripped = raw.strip()
                if stripped:
                    sentences.append(Sentence(
                        text=stripped,
                        start=base_offset + start + lead,
                        end=base_offset + start + lead + len(stripped)))
                start = j + 1
            i = j + 1
        else:
            i += 1
    tail = text[start:]
    lead = len(tail) - len(tail.lstrip())
    stripped = tail.strip()
    if stripped:
        sentences.append(Sentence(text=stripped,
                                  start=base_offset + start + lead,
                                  end=base_offset + start + lead + len(stripped)))
    return sentences


class _HtmlPolicy(HTMLParser):
    _HEADINGS = {"h1", "h2", "h3", "h4", "h5", "h6"}
    _BREAKS = {"p", "div", "li", "br", "section", "article", "ul", "ol",
               "table", "tr"}
    _SKIP = {"script", "style"}

    def __init__(self, source: str):
        super().__init__(convert_charrefs=False)
        self.source = source
        self.line_offsets = [0]
        for line in source.split("\n")[:-1]:
            self.line_offsets.append(self.line_offsets[-1] + len(line) + 1)
        self.paragraphs: list[tuple[str | None, list[tuple[str, int]]]] = []
        self.heading: str | None = None
        self.pieces: list[tuple[str, int]] = []
        self.in_heading = False
        self.heading_pieces: list[str] = []
        self.skip_depth = 0

    def _offset(self) -> int:
        line, col = self.getpos()
        return self.line_offsets[line - 1] + col

    def _flush(self):
        if self.pieces:
            self.paragraphs.append((self.heading, self.pieces))
            self.pieces = []

    def handle_starttag(self, tag, attrs):
        tag = tag.lower()
        if tag in self._SKIP:
            self.skip_depth += 1
        elif tag in self._HEADINGS:
            self._flush()
            self.in_heading = True
            self.heading_pieces = []
        elif tag in self._BREAKS:
            self._flush()

    def handle_endtag(self, tag):
        tag = tag.lower()
        if tag in self._SKIP and self.skip_depth:
            self.skip_depth -= 1
        elif tag in self._HEADINGS:
            self.in_heading = False
            text = "".join(self.heading_pieces).strip()
            self.heading = text or None
        elif tag in self._BREAKS:
            self._flush()

    def handle_data(self, data):
        if self.skip_depth:
            return
        if self.in_heading:
            self.heading_pieces.append(data)
        elif data.strip():
            self.pieces.append((data, self._offset()))

    def result(self) -> PolicyText:
        self._flush()
        paragraphs = []
        for heading, pieces in self.paragraphs:
            sentences: list[Sentence] = []
            for text, offset in pieces:
                sentences.extend(split_sentences(text, offset))
            if sentences or heading:
                paragraphs.append(Paragraph(heading=heading,
                                            sentences=tuple(sentences)))
        return PolicyText(paragraphs=tuple(paragraphs))


_HTML_HINT = re.compile(r"<\s*(h[1-6]|p|div|br|li|html|body|ul|ol)\b", re.I)


def split_policy(raw: str) -> PolicyText:
    """Segment raw policy text (or simple HTML) into paragraphs/sentences."""
    if not raw or not raw.strip():
        raise DocumentError("policy input is empty")
    if _HTML_HINT.search(raw):
        parser = _HtmlPolicy(raw)
        parser.feed(raw)
        parser.close()
        return parser.result()

    paragraphs: list[Paragraph] = []
    heading: str | None = None
    buffer: list[tuple[str, int]] = []
    offset = 0

    def flush():
        nonlocal heading, buffer
        if buffer:
            sentences: list[Sentence] = []
            for text, off in buffer:
                sentences.extend(split_sentences(text, off))
            paragraphs.append(Paragraph(heading=heading,
                                        sentences=tuple(sentences)))
            buffer = []

    for line in raw.split("\n"):
        stripped = line.strip()
        if not stripped:
            flush()
            heading = None
        elif _looks_like_heading(line):
            flush()
            heading = stripped
        else:
            buffer.append((line, offset))
        offset += len(line) + 1
    flush()
    return PolicyText(paragraphs=tuple(paragraphs))


def _tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def phrase_similarity(phrase: str, sentence_tokens: list[str]) -> float:
    """Best Jaccard between the phrase token set and a same-length window."""
    best = 0.0
    for alternative in phrase.split("/"):
        ptokens = set(_tokens(alternative))
        if not ptokens:
            continue
        width = len(ptokens)
        if width > len(sentence_tokens):
            windows = [set(sentence_tokens)] if sentence_tokens else []
        else:
            windows = [set(sentence_tokens[i:i + width])
                       for i in range(len(sentence_tokens) - width + 1)]
        for window in windows:
            union = len(ptokens | window)
            if union:
                best = max(best, len(ptokens & window) / union)
    return best


def _word_boundary(keyword: str) -> re.Pattern:
    return re.compile(r"(?<![0-9A-Za-z])" + re.escape(keyword)
                      + r"(?![0-9A-Za-z])", re.I)


def segment(policy: PolicyText, lexicon: KeywordLexicon,
            similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD
            ) -> list[PolicySegment]:
    """Sentences matched to data types, with replayable evidence."""
    segments: list[PolicySegment] = []
    for p_index, paragraph in enumerate(policy.paragraphs):
        for s_index, sentence in enumerate(paragraph.sentences):
            tokens = _tokens(sentence.text)
            for data_type in DATA_TYPES:
                entry = lexicon.categories[data_type]
                evidence: list[str] = []
                if paragraph.heading:
                    for kw in entry["headings"]:
                        if _word_boundary(kw).search(paragraph.heading):
                            evidence.append(f"heading:{kw}")
                for kw in entry["keywords"]:
                    if _word_boundary(kw).search(sentence.text):
                        evidence.append(f"keyword:{kw}")
                for phrase in entry.get("phrases", ()):
                    if phrase_similarity(phrase, tokens) >= similarity_threshold:
                        evidence.append(f"phrase:{phrase}")
                if evidence:
                    segments.append(PolicySegment(
                        data_type=data_type,
                        text=sentence.text,
                        paragraph_index=p_index,
                        sentence_index=s_index,
                        evidence=tuple(evidence)))
    return segments


def replay_evidence(seg: PolicySegment, lexicon: KeywordLexicon,
                    heading: str | None = None,
                    similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD
                    ) -> bool:
    """Re-run each recorded rule on the stored sentence; all must fire."""
    tokens = _tokens(seg.text)
    for item in seg.evidence:
        rule, _, value = item.partition(":")
        if rule == "heading":
            if heading is None or not _word_boundary(value).search(heading):
                return False
        elif rule == "keyword":
            if not _word_boundary(value).search(seg.text):
                return False
        elif rule == "phrase":
            if phrase_similarity(value, tokens) < similarity_threshold:
                return False
        else:
            return False
    return True


@dataclass(frozen=True)
class TaxonomyMap:
    categories: dict   # label name (lowercased) -> data type
    documented: frozenset  # every known label name, lowercased

    @classmethod
    def load(cls, override=None) -> "TaxonomyMap":
        raw = assets.load_json_asset(assets.TAXONOMY_MAP, override)
        categories = {}
        for name, data_type in raw["mappings"].items():
            if data_type not in DATA_TYPES:
                raise PribomError(f"taxonomy map: {name!r} maps to unknown "
                                  f"category {data_type!r}")
            categories[name.lower()] = data_type
        documented = frozenset(categories) | frozenset(
            n.lower() for n in raw.get("unmapped", ()))
        return cls(categories=categories, documented=documented)


def parse_label(rows, taxonomy: TaxonomyMap,
                diags: Diagnostics | None = None) -> list[LabelDeclaration]:
    """Structured Data-Safety rows -> declarations for mapped, collected types."""
    if not isinstance(rows, list):
        raise DocumentError("label input must be a JSON list of rows")
    declarations: list[LabelDeclaration] = []
    for index, row in enumerate(rows):
        if not isinstance(row, dict) or "label_name" not in row:
            raise DocumentError(f"label row {index} is malformed")
        name = row["label_name"]
        if not row.get("collected", False):
            continue
        key = name.lower()
        if key not in taxonomy.documented:
            if diags is not None:
                diags.warning("notice-analyzer",
                              f"label {name!r} is not in the documented "
                              "Data-Safety taxonomy")
            continue
        data_type = taxonomy.categories.get(key)
        if data_type is None:
            if diags is not None:
                diags.info("notice-analyzer",
                           f"label {name!r} has no category mapping; skipped")
            continue
        declarations.append(LabelDeclaration(
            label_name=name,
            data_type=data_type,
            optional_flag=bool(row.get("optional", False)),
            purposes=tuple(row.get("purposes", ()))))
    return declarations


def attach(entries, segments, declarations) -> list[WidgetEntry]:
    """Fill each entry's disclosure sections by data-type match.

    Replaces (not appends) both sections, so attaching twice is a
    no-op and entry order never matters.
    """
    out = []
    for entry in entries:
        collected = {f.data_type for f in entry.findings}
        out.append(WidgetEntry(
            identifier=entry.identifier,
            bindings=entry.bindings,
            findings=entry.findings,
            widget_min_api=entry.widget_min_api,
            tpls=entry.tpls,
            policy_segments=tuple(s for s in segments
                                  if s.data_type in collected),
            label_declarations=tuple(d for d in declarations
                                     if d.data_type in collected)))
    return out
