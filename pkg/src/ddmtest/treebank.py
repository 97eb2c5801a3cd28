"""CoNLL treebank parsing and sentence preprocessing.

Reads CoNLL-U / CoNLL-X blocks (10 tab-separated columns, blank-line sentence
boundaries, '#' comments), then cleans each sentence: multiword range lines
are dropped, punctuation and non-word nodes are deleted, and orphaned tokens
are reattached to their nearest surviving ancestor. A sentence that is not a
single tree afterwards is excluded with a reason, never silently dropped.
"""

from __future__ import annotations

import re
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .trees import LinearizedTree

_INT_RE = re.compile(r"[0-9]+")
_RANGE_RE = re.compile(r"([0-9]+)-[0-9]+")
_DECIMAL_RE = re.compile(r"([0-9]+)\.[0-9]+")
_N_COLUMNS = 10

# loose tag patterns seen across annotation schemes (PTB ".", Prague "Z:...",
# UD "PUNCT", assorted "Punc"/"PU" variants, or the character itself as tag)
_GENERIC_PUNCT_RE = re.compile(r"PUNCT|PUNC|Punc|punc|PU|Z\S*|[^\w\s]+")


class Scheme(Enum):
    UD = "ud"
    PRAGUE = "prague"
    STANFORD = "stanford"
    GENERIC = "generic"


class ExclusionReason(Enum):
    CYCLE = "cycle"
    DISCONNECTED = "disconnected"
    MULTIPLE_ROOTS = "multiple_roots"
    EMPTY_AFTER_PREPROCESSING = "empty_after_preprocessing"
    MALFORMED = "malformed"


@dataclass(frozen=True)
class RawToken:
    id: int
    head: int
    form: str
    pos: str
    deprel: str
    is_empty_node: bool = False
    is_range_token: bool = False


@dataclass
class RawSentence:
    tokens: list[RawToken]
    source_id: str
    treebank_id: str = ""


@dataclass(frozen=True)
class ParseError:
    line_no: int
    message: str

    def __str__(self):
        return f"line {self.line_no}: {self.message}"


def _ud_punct(token: RawToken) -> bool:
    return token.pos == "PUNCT"


def _prague_punct(token: RawToken) -> bool:
    # Prague positional tags put punctuation in main class Z
    return token.pos.startswith("Z")


def _generic_punct(token: RawToken) -> bool:
    return _GENERIC_PUNCT_RE.fullmatch(token.pos) is not None


def _hamledt_null(token: RawToken) -> bool:
    # null elements in the Bengali/Hindi/Telugu HamleDT corpora surface as
    # tokens whose form is the literal string NULL
    return token.form == "NULL"


_DEFAULT_PUNCT: dict[Scheme, Callable[[RawToken], bool]] = {
    Scheme.UD: _ud_punct,
    Scheme.PRAGUE: _prague_punct,
    Scheme.STANFORD: _generic_punct,
    Scheme.GENERIC: _generic_punct,
}

_DEFAULT_EMPTY: dict[Scheme, Callable[[RawToken], bool] | None] = {
    Scheme.UD: None,
    Scheme.PRAGUE: _hamledt_null,
    Scheme.STANFORD: _hamledt_null,
    Scheme.GENERIC: None,
}


@dataclass(frozen=True)
class PreprocessConfig:
    """Deletion rules applied before any analysis.

    ``punct_predicate`` / ``empty_node_predicate`` override the per-scheme
    defaults; both must be pure functions of a single token. CoNLL-U nodes
    with decimal ids are always recognized as non-word nodes regardless of
    the predicate.
    """

    scheme: Scheme = Scheme.UD
    punct_predicate: Callable[[RawToken], bool] | None = None
    empty_node_predicate: Callable[[RawToken], bool] | None = None
    remove_empty_nodes: bool = True

    def is_punct(self, token: RawToken) -> bool:
        pred = self.punct_predicate or _DEFAULT_PUNCT[self.scheme]
        return pred(token)

    def is_empty(self, token: RawToken) -> bool:
        if token.is_empty_node:
            return True
        pred = self.empty_node_predicate or _DEFAULT_EMPTY[self.scheme]
        return pred(token) if pred is not None else False


def _iter_lines(stream) -> Iterator[str]:
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8")
    if isinstance(stream, str):
        yield from stream.splitlines()
        return
    for line in stream:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield line.rstrip("\n").rstrip("\r")


def _parse_token_line(line: str, line_no: int) -> RawToken:
    cols = line.split("\t")
    if len(cols) != _N_COLUMNS:
        raise ValueError(f"expected {_N_COLUMNS} columns, got {len(cols)}")
    idc, form, pos, head_c, deprel = cols[0], cols[1], cols[3], cols[6], cols[7]
    if _RANGE_RE.fullmatch(idc):
        first = int(idc.split("-", 1)[0])
        return RawToken(id=first, head=0, form=form, pos=pos, deprel=deprel,
                        is_range_token=True)
    if _DECIMAL_RE.fullmatch(idc):
        base = int(idc.split(".", 1)[0])
        return RawToken(id=base, head=0, form=form, pos=pos, deprel=deprel,
                        is_empty_node=True)
    if not _INT_RE.fullmatch(idc):
        raise ValueError(f"non-numeric token id {idc!r}")
    tid = int(idc)
    if tid < 1:
        raise ValueError(f"token id must be >= 1, got {tid}")
    if not _INT_RE.fullmatch(head_c):
        raise ValueError(f"non-numeric head {head_c!r}")
    head = int(head_c)
    if head == tid:
        raise ValueError(f"token {tid} is its own head")
    return RawToken(id=tid, head=head, form=form, pos=pos, deprel=deprel)


def parse_treebank(stream, fmt: str = "conllu", treebank_id: str = "",
                   errors: list[ParseError] | None = None) -> Iterator[RawSentence]:
    """Yield one RawSentence per blank-line-separated block.

    ``stream`` may be a text or binary file object, an iterable of lines, or
    the file content itself. A malformed sentence is recorded in ``errors``
    (one entry, naming the first offending line) and skipped; parsing
    continues with the next sentence.
    """
    if fmt not in ("conllu", "conllx"):
        raise ValueError(f"unknown treebank format {fmt!r}")
    tokens: list[RawToken] = []
    sent_id: str | None = None
    bad: ParseError | None = None
    ordinal = 0

    def flush():
        nonlocal tokens, sent_id, bad, ordinal
        if not tokens and bad is None:
            sent_id = None
            return None
        ordinal += 1
        out = None
        if bad is None:
            regular = [t.id for t in tokens
                       if not t.is_range_token and not t.is_empty_node]
            if any(a >= b for a, b in zip(regular, regular[1:])):
                bad = ParseError(line_no, "token ids not strictly increasing")
            else:
                out = RawSentence(tokens=tokens,
                                  source_id=sent_id or str(ordinal),
                                  treebank_id=treebank_id)
        if bad is not None and errors is not None:
            errors.append(bad)
        tokens = []
        sent_id = None
        bad = None
        return out

    line_no = 0
    for line_no, line in enumerate(_iter_lines(stream), start=1):
        if not line.strip():
            sentence = flush()
            if sentence is not None:
                yield sentence
            continue
        if line.startswith("#"):
            if line[1:].split("=", 1)[0].strip() == "sent_id":
                sent_id = line.split("=", 1)[1].strip()
            continue
        if bad is not None:
            continue
        try:
            tokens.append(_parse_token_line(line, line_no))
        except ValueError as exc:
            bad = ParseError(line_no, str(exc))
    sentence = flush()
    if sentence is not None:
        yield sentence


def preprocess(sentence: RawSentence,
               cfg: PreprocessConfig = PreprocessConfig()
               ) -> LinearizedTree | ExclusionReason:
    """Clean one sentence into a tree, or say why it cannot be one.

    Range lines are dropped; non-word nodes and punctuation are deleted;
    survivors whose head chain runs through deleted tokens are reattached to
    the nearest non-deleted ancestor (the root if there is none); survivors
    are renumbered 1..n in surface order.
    """
    tokens = [t for t in sentence.tokens if not t.is_range_token]
    n_all = len(tokens)
    if n_all == 0:
        return ExclusionReason.EMPTY_AFTER_PREPROCESSING

    by_id: dict[int, int] = {}
    for i, t in enumerate(tokens):
        if not t.is_empty_node:
            if t.id in by_id:
                return ExclusionReason.MALFORMED
            by_id[t.id] = i
    for i, t in enumerate(tokens):
        by_id.setdefault(t.id, i)

    deleted = [False] * n_all
    for i, t in enumerate(tokens):
        if cfg.is_empty(t):
            deleted[i] = cfg.remove_empty_nodes
        elif cfg.is_punct(t):
            deleted[i] = True

    head_idx = [-1] * n_all
    for i, t in enumerate(tokens):
        if t.head == 0:
            continue
        j = by_id.get(t.head)
        if j is None:
            return ExclusionReason.MALFORMED
        head_idx[i] = j

    survivors = [i for i in range(n_all) if not deleted[i]]
    if not survivors:
        return ExclusionReason.EMPTY_AFTER_PREPROCESSING

    new_head: dict[int, int] = {}
    for i in survivors:
        seen = set()
        j = head_idx[i]
        while j != -1 and deleted[j]:
            if j in seen:
                return ExclusionReason.CYCLE
            seen.add(j)
            j = head_idx[j]
        new_head[i] = j

    roots = [i for i in survivors if new_head[i] == -1]
    if len(roots) > 1:
        return ExclusionReason.MULTIPLE_ROOTS

    safe: set[int] = set()
    for i in survivors:
        path: list[int] = []
        on_path: set[int] = set()
        j = i
        while j != -1 and j not in safe:
            if j in on_path:
                return ExclusionReason.CYCLE
            on_path.add(j)
            path.append(j)
            j = new_head[j]
        safe.update(path)
    if not roots:
        return ExclusionReason.CYCLE

    position = {i: k + 1 for k, i in enumerate(survivors)}
    edges = tuple((position[i], position[new_head[i]])
                  for i in survivors if new_head[i] != -1)
    try:
        return LinearizedTree(n=len(survivors), edges=edges)
    except ValueError:
        return ExclusionReason.DISCONNECTED


def gather_files(paths: Iterable[str | Path]) -> list[Path]:
    """Expand files and directories into a sorted list of treebank files.

    Directories are searched recursively for *.conllu and *.conll.
    """
    out: list[Path] = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            found = sorted(q for pat in ("*.conllu", "*.conll")
                           for q in p.rglob(pat))
            out.extend(found)
        elif p.is_file():
            out.append(p)
        else:
            raise FileNotFoundError(f"no such file or directory: {p}")
    return out
