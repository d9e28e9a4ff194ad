"""URL parsing and lexical phishing features.

Everything here is a pure function of the URL text (plus an optional brand
list), so batch extraction can be parallelised per record.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

SENSITIVE_WORDS = (
    "secure",
    "account",
    "update",
    "login",
    "sign-in",
    "banking",
    "confirm",
    "verify",
)

ACCEPTED_SCHEMES = ("http", "https")

# percentage-style RT features, and UrlLengthRT in characters
DEFAULT_PCT_THRESHOLDS = (0.30, 0.60)
DEFAULT_URL_LENGTH_THRESHOLDS = (54, 75)

# generic URI split: scheme ":" ["//" authority] path ["?" query] ["#" fragment]
_URI_RE = re.compile(
    r"^(?P<scheme>[A-Za-z][A-Za-z0-9+.\-]*):"
    r"(?://(?P<authority>[^/?#]*))?"
    r"(?P<path>[^?#]*)"
    r"(?:\?(?P<query>[^#]*))?"
    r"(?:#(?P<fragment>.*))?$",
    re.DOTALL,
)
_DOTTED_QUAD_RE = re.compile(r"^(\d{1,3})\.(\d{1,3})\.(\d{1,3})\.(\d{1,3})$")

# TLDs recognised when looking for a domain-shaped token inside a path
_PATH_TLDS = (
    "com", "net", "org", "info", "biz", "gov", "edu", "mil", "int", "io",
    "co", "me", "us", "uk", "de", "fr", "ru", "cn", "jp", "br", "in", "it",
    "nl", "au", "ca", "es", "pl", "tk", "ml", "ga", "cf", "gq", "xyz", "top",
    "online", "site", "mobi",
)
_PATH_DOMAIN_RE = re.compile(
    r"(?:^|[^a-z0-9\-])[a-z0-9\-]+(?:\.[a-z0-9\-]+)*\.(?:%s)(?=$|[^a-z0-9\-])"
    % "|".join(_PATH_TLDS)
)


class MalformedUrl(ValueError):
    """The URL cannot be decomposed; callers skip and log the record."""


class InvalidThresholds(ValueError):
    pass


@dataclass(frozen=True)
class UrlParts:
    scheme: str
    host: str
    port: int | None = None
    path: str = ""
    query: tuple[str, ...] = ()
    fragment: str | None = None
    has_userinfo: bool = False
    userinfo: str | None = field(default=None, repr=False)

    @property
    def registered_domain(self) -> str:
        # last two labels; no public-suffix list, so "bbc.co.uk" -> "co.uk"
        if _DOTTED_QUAD_RE.match(self.host):
            return self.host
        labels = [lb for lb in self.host.split(".") if lb]
        return ".".join(labels[-2:])

    @property
    def subdomain(self) -> str:
        reg = self.registered_domain
        if self.host == reg:
            return ""
        return self.host[: len(self.host) - len(reg)].rstrip(".")

    def unparse(self) -> str:
        """Reassemble a URL equivalent to the one that was parsed."""
        out = f"{self.scheme}://"
        if self.userinfo is not None:
            out += self.userinfo + "@"
        out += self.host
        if self.port is not None:
            out += f":{self.port}"
        out += self.path
        if self.query:
            out += "?" + "&".join(self.query)
        if self.fragment is not None:
            out += "#" + self.fragment
        return out


@dataclass(frozen=True)
class LexicalFeatureSet:
    NumDots: int
    NumDash: int
    NumDashInHostname: int
    NumNumericChars: int
    NumQueryComponents: int
    PathLevel: int
    UrlLength: int
    HostnameLength: int
    NumSensitiveWords: int
    AtSymbol: int
    IpAddress: int
    DomainInPaths: int
    EmbeddedBrandName: int
    UrlLengthRT: int

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


LEXICAL_FEATURES = tuple(LexicalFeatureSet.__dataclass_fields__)


def parse_url(raw: str) -> UrlParts:
    """Split ``raw`` into scheme, host, port, path, query and fragment.

    Userinfo (``user@`` before the host) is stripped and reported through
    ``has_userinfo``. The query is split on ``&`` with empty pieces dropped.
    Raises :class:`MalformedUrl` for a missing scheme, an unsupported scheme,
    an empty host or a non-numeric port.
    """
    text = raw.strip() if raw else ""
    if not text:
        raise MalformedUrl("empty URL")
    m = _URI_RE.match(text)
    if m is None:
        raise MalformedUrl(f"no scheme: {text!r}")
    scheme = m.group("scheme").lower()
    if scheme not in ACCEPTED_SCHEMES:
        raise MalformedUrl(f"unsupported scheme {scheme!r}: {text!r}")
    authority = m.group("authority")
    if not authority:
        raise MalformedUrl(f"empty host: {text!r}")

    userinfo = None
    if "@" in authority:
        userinfo, _, authority = authority.rpartition("@")

    port = None
    if authority.startswith("["):
        end = authority.find("]")
        if end < 0:
            raise MalformedUrl(f"unterminated IPv6 literal: {text!r}")
        host, rest = authority[: end + 1], authority[end + 1:]
        if rest and not rest.startswith(":"):
            raise MalformedUrl(f"junk after IPv6 literal: {text!r}")
        port_text = rest[1:] if rest else ""
    else:
        host, sep, port_text = authority.partition(":")
        if not sep:
            port_text = ""
    if port_text:
        if not port_text.isdigit() or int(port_text) > 65535:
            raise MalformedUrl(f"bad port {port_text!r}: {text!r}")
        port = int(port_text)

    host = host.lower()
    if not host:
        raise MalformedUrl(f"empty host: {text!r}")

    query_text = m.group("query")
    query = tuple(q for q in query_text.split("&") if q) if query_text else ()
    return UrlParts(
        scheme=scheme,
        host=host,
        port=port,
        path=m.group("path"),
        query=query,
        fragment=m.group("fragment"),
        has_userinfo=userinfo is not None,
        userinfo=userinfo,
    )


def count_sensitive_words(raw: str, words: tuple[str, ...] | list[str] = SENSITIVE_WORDS) -> int:
    """Count start positions in ``raw`` where a sensitive word occurs.

    Matching is case-insensitive and every occurrence counts, so
    ``login/login`` scores 2. Two list words starting at the same position
    count once.
    """
    text = raw.lower()
    starts: set[int] = set()
    for word in words:
        w = word.lower()
        if not w:
            continue
        i = text.find(w)
        while i >= 0:
            starts.add(i)
            i = text.find(w, i + 1)
    return len(starts)


def apply_rt_thresholds(value: float, lo: float, hi: float) -> int:
    """Map ``value`` to -1 (<= lo), 0 (<= hi) or 1 (> hi)."""
    if not lo < hi:
        raise InvalidThresholds(f"need lo < hi, got lo={lo}, hi={hi}")
    if value <= lo:
        return -1
    if value <= hi:
        return 0
    return 1


def is_dotted_quad(host: str) -> bool:
    m = _DOTTED_QUAD_RE.match(host)
    return bool(m) and all(0 <= int(g) <= 255 for g in m.groups())


def _after_scheme(raw: str, scheme: str) -> str:
    text = raw.strip()
    head = text[: len(scheme) + 3].lower()
    if head == scheme + "://":
        return text[len(scheme) + 3:]
    return text[len(scheme) + 1:]


def _has_domain_token(path: str, brands) -> bool:
    lowered = path.lower()
    if any(b and b in lowered for b in brands):
        return True
    return _PATH_DOMAIN_RE.search(lowered) is not None


def _embedded_brand(parts: UrlParts, brands) -> bool:
    if not brands:
        return False
    reg_label = parts.registered_domain.split(".")[0]
    for brand in brands:
        if brand and brand in parts.host and brand != reg_label:
            return True
    return False


def extract_lexical_features(
    parts: UrlParts,
    raw: str,
    brand_list=(),
    sensitive_words=SENSITIVE_WORDS,
    url_length_thresholds=DEFAULT_URL_LENGTH_THRESHOLDS,
) -> LexicalFeatureSet:
    text = raw.strip()
    brands = tuple(b.lower() for b in brand_list)
    ip = is_dotted_quad(parts.host)
    at_symbol = parts.has_userinfo or "@" in parts.path or any("@" in q for q in parts.query)
    lo, hi = url_length_thresholds
    return LexicalFeatureSet(
        NumDots=_after_scheme(text, parts.scheme).count("."),
        NumDash=text.count("-"),
        NumDashInHostname=parts.host.count("-"),
        NumNumericChars=sum(ch.isdigit() for ch in text),
        NumQueryComponents=len(parts.query),
        PathLevel=sum(1 for seg in parts.path.split("/") if seg),
        UrlLength=len(text),
        HostnameLength=len(parts.host),
        NumSensitiveWords=count_sensitive_words(text, sensitive_words),
        AtSymbol=int(at_symbol),
        IpAddress=int(ip),
        DomainInPaths=int(_has_domain_token(parts.path, brands)),
        EmbeddedBrandName=int(not ip and _embedded_brand(parts, brands)),
        UrlLengthRT=apply_rt_thresholds(len(text), lo, hi),
    )


def read_word_list(path: str | Path) -> list[str]:
    """Read a one-token-per-line list; blank lines and ``#`` comments ignored."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        token = line.split("#", 1)[0].strip().lower()
        if token:
            words.append(token)
    return words


def load_brand_list(path: str | Path | None = None) -> list[str]:
    """Load the brand list at ``path``, or the bundled default list."""
    if path is not None:
        return read_word_list(path)
    bundled = resources.files("phishlens") / "data" / "brands.txt"
    with resources.as_file(bundled) as p:
        return read_word_list(p)
