"""Content features scanned from stored HTML pages.

The scanner is deliberately a tolerant regex pass rather than a validating
parser: phishing kits ship broken markup and we still want the tags.
"""

from __future__ import annotations

import enum
import logging
import re
from collections import Counter
from dataclasses import asdict, dataclass, field

from .urls import (
    DEFAULT_PCT_THRESHOLDS,
    MalformedUrl,
    UrlParts,
    apply_rt_thresholds,
    parse_url,
)

log = logging.getLogger(__name__)

NULL_HREFS = frozenset({"", "#", "#content", "javascript:void(0)", "javascript:;"})
ABNORMAL_FORM_ACTIONS = frozenset({"", "#", "about:blank", "javascript:true"})

_COMMENT_RE = re.compile(r"<!--.*?(?:-->|$)", re.DOTALL)
_RAW_TEXT_RE = re.compile(
    r"(<\s*(script|style)\b[^>]*>).*?(<\s*/\s*\2\s*>|$)", re.DOTALL | re.IGNORECASE
)
_TAG_RE = re.compile(
    r"<\s*(a|form|iframe|frame|meta|script|link)(?=[\s/>])([^>]*)>?",
    re.IGNORECASE,
)
_ATTR_RE = re.compile(
    r"""([^\s"'<>/=]+)\s*=\s*(?:"([^"]*)"?|'([^']*)'?|([^\s"'>]+))""",
)
_SCHEME_RE = re.compile(r"^[a-z][a-z0-9+.\-]*:", re.IGNORECASE)
_META_URL_RE = re.compile(r"url\s*=\s*['\"]?([^'\";\s]+)", re.IGNORECASE)


class HyperlinkClass(enum.Enum):
    INTERNAL = "Internal"
    EXTERNAL = "External"
    NULL_SELF = "NullSelf"


@dataclass(frozen=True)
class HtmlDocument:
    page_url: UrlParts
    markup: str | bytes = ""


@dataclass
class TagInventory:
    anchors: list[str] = field(default_factory=list)
    forms: list[tuple[str, str]] = field(default_factory=list)
    iframes_or_frames: int = 0
    resource_refs: list[str] = field(default_factory=list)
    undecodable: int = 0


@dataclass(frozen=True)
class RtConfig:
    """(lo, hi) threshold pairs for the ternary content features."""

    ext_null_self: tuple[float, float] = DEFAULT_PCT_THRESHOLDS
    ext_meta_script_link: tuple[float, float] = DEFAULT_PCT_THRESHOLDS


@dataclass(frozen=True)
class ContentFeatureSet:
    PctExtHyperlinks: float
    PctNullSelfRedirectHyperlinks: float
    PctExtResourceUrls: float
    FrequentDomainNameMismatch: int
    SubmitInfoToEmail: int
    InsecureForms: int
    IframeOrFrame: int
    AbnormalFormAction: int
    PctExtNullSelfRedirectHyperlinksRT: int
    ExtMetaScriptLinkRT: int
    AbnormalExtFormActionR: int

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


CONTENT_FEATURES = tuple(ContentFeatureSet.__dataclass_fields__)


def _decode(markup: str | bytes) -> tuple[str, int]:
    if isinstance(markup, str):
        return markup, 0
    text = markup.decode("utf-8", errors="replace")
    return text, text.count("�")


def _attrs(blob: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for m in _ATTR_RE.finditer(blob):
        name = m.group(1).lower()
        if name in out:
            continue
        value = next((g for g in m.group(2, 3, 4) if g is not None), "")
        out[name] = value.strip()
    return out


def _meta_url(attrs: dict[str, str]) -> str | None:
    content = attrs.get("content")
    if not content:
        return None
    m = _META_URL_RE.search(content)
    if m:
        return m.group(1)
    if content.lower().startswith(("http://", "https://", "//")):
        return content
    return None


def scan_document(doc: HtmlDocument) -> TagInventory:
    """Collect anchors, forms, frames and meta/script/link references.

    Never raises: undecodable bytes are replaced and counted in
    ``undecodable``, and unterminated tags are read up to end of input.
    """
    text, bad = _decode(doc.markup)
    inv = TagInventory(undecodable=bad)
    if bad:
        log.debug("%d undecodable byte sequences in %s", bad, doc.page_url.host)
    text = _COMMENT_RE.sub(" ", text)
    # keep the opening tag (for src) but drop script/style bodies
    text = _RAW_TEXT_RE.sub(lambda m: m.group(1) + " ", text)
    for m in _TAG_RE.finditer(text):
        tag = m.group(1).lower()
        attrs = _attrs(m.group(2))
        if tag == "a":
            if "href" in attrs:
                inv.anchors.append(attrs["href"])
        elif tag == "form":
            inv.forms.append((attrs.get("action", ""), attrs.get("method", "get").lower()))
        elif tag in ("iframe", "frame"):
            inv.iframes_or_frames += 1
        elif tag == "script":
            if attrs.get("src"):
                inv.resource_refs.append(attrs["src"])
        elif tag == "link":
            if attrs.get("href"):
                inv.resource_refs.append(attrs["href"])
        else:
            url = _meta_url(attrs)
            if url:
                inv.resource_refs.append(url)
    return inv


def _absolute(href: str, base: UrlParts) -> UrlParts | None:
    """Parse an absolute or scheme-relative href; None for relative ones.

    Raises MalformedUrl for absolute references we cannot decompose.
    """
    if href.startswith("//"):
        return parse_url(f"{base.scheme}:{href}")
    if _SCHEME_RE.match(href):
        return parse_url(href)
    return None


def _same_page(target: UrlParts, base: UrlParts) -> bool:
    return (
        target.host == base.host
        and (target.port or None) == (base.port or None)
        and (target.path or "/") == (base.path or "/")
        and target.query == base.query
    )


def classify_hyperlink(href: str, base: UrlParts) -> HyperlinkClass:
    h = href.strip()
    if h.lower() in NULL_HREFS:
        return HyperlinkClass.NULL_SELF
    try:
        target = _absolute(h, base)
    except MalformedUrl:
        return HyperlinkClass.EXTERNAL
    if target is None:
        return HyperlinkClass.INTERNAL
    if _same_page(target, base):
        return HyperlinkClass.NULL_SELF
    if target.registered_domain != base.registered_domain:
        return HyperlinkClass.EXTERNAL
    return HyperlinkClass.INTERNAL


def _fraction(count: int, total: int) -> float:
    return count / total if total else 0.0


def _modal_domain(anchors: list[str], base: UrlParts) -> str | None:
    domains: Counter[str] = Counter()
    for href in anchors:
        h = href.strip()
        if h.lower() in NULL_HREFS:
            continue
        try:
            target = _absolute(h, base)
        except MalformedUrl:
            continue
        if target is not None:
            domains[target.registered_domain] += 1
    if not domains:
        return None
    # Counter keeps first-seen order, so ties go to the earliest domain
    return domains.most_common(1)[0][0]


def _form_state(action: str, base: UrlParts) -> int:
    """-1 normal, 0 external, 1 abnormal."""
    a = action.strip()
    if a.lower() in ABNORMAL_FORM_ACTIONS:
        return 1
    try:
        target = _absolute(a, base)
    except MalformedUrl:
        # mailto:, javascript: and other non-web targets leave the site
        return 0
    if target is not None and target.registered_domain != base.registered_domain:
        return 0
    return -1


def _form_scheme(action: str, base: UrlParts) -> str:
    a = action.strip()
    if a.startswith("//"):
        return base.scheme
    m = _SCHEME_RE.match(a)
    if m:
        return m.group(0)[:-1].lower()
    return base.scheme


def extract_content_features(
    doc: HtmlDocument,
    inv: TagInventory | None = None,
    rt_config: RtConfig = RtConfig(),
) -> ContentFeatureSet:
    if inv is None:
        inv = scan_document(doc)
    base = doc.page_url
    classes = Counter(classify_hyperlink(h, base) for h in inv.anchors)
    n_anchors = len(inv.anchors)
    pct_ext = _fraction(classes[HyperlinkClass.EXTERNAL], n_anchors)
    pct_null = _fraction(classes[HyperlinkClass.NULL_SELF], n_anchors)

    ext_res = sum(
        classify_hyperlink(r, base) is HyperlinkClass.EXTERNAL for r in inv.resource_refs
    )
    pct_ext_res = _fraction(ext_res, len(inv.resource_refs))

    actions = [a for a, _ in inv.forms]
    modal = _modal_domain(inv.anchors, base)
    states = [_form_state(a, base) for a in actions]

    return ContentFeatureSet(
        PctExtHyperlinks=pct_ext,
        PctNullSelfRedirectHyperlinks=pct_null,
        PctExtResourceUrls=pct_ext_res,
        FrequentDomainNameMismatch=int(modal is not None and modal != base.registered_domain),
        SubmitInfoToEmail=int(any(a.strip().lower().startswith("mailto:") for a in actions)),
        InsecureForms=int(any(_form_scheme(a, base) == "http" for a in actions)),
        IframeOrFrame=int(inv.iframes_or_frames > 0),
        AbnormalFormAction=int(any(a.strip().lower() in ABNORMAL_FORM_ACTIONS for a in actions)),
        # sum stays within [0, 1]: External and NullSelf are disjoint classes
        PctExtNullSelfRedirectHyperlinksRT=apply_rt_thresholds(
            min(pct_ext + pct_null, 1.0), *rt_config.ext_null_self
        ),
        ExtMetaScriptLinkRT=apply_rt_thresholds(pct_ext_res, *rt_config.ext_meta_script_link),
        AbnormalExtFormActionR=max(states, default=-1),
    )
