"""The bundled diagram corpus and its loader."""

from __future__ import annotations

import importlib.resources

from .diagram import parse_pd


class CorpusEntry:
    def __init__(self, fields):
        self.name = fields["name"]
        self.pd_text = fields["pd"]
        self.det = _int_or_none(fields.get("det"))
        self.alternating = fields.get("alternating")  # 'knot' | 'link' | 'no'
        self.kh_total = _int_or_none(fields.get("kh_total"))
        self.sz_total = _int_or_none(fields.get("sz_total"))
        self.circles0 = _int_or_none(fields.get("circles0"))
        self.partner = fields.get("partner")
        self.move = fields.get("move")
        self.z = fields.get("z")
        self.w = fields.get("w")
        self.annular_partner = fields.get("annular_partner")

    def diagram(self):
        return parse_pd(self.pd_text)

    def __repr__(self):
        return f"CorpusEntry({self.name})"


def _int_or_none(v):
    return None if v is None else int(v)


def _parse(text):
    entries = []
    fields = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[entry]":
            if fields:
                entries.append(CorpusEntry(fields))
            fields = {}
            continue
        if "=" in line and fields is not None:
            k, v = line.split("=", 1)
            fields[k.strip()] = v.strip()
    if fields:
        entries.append(CorpusEntry(fields))
    return entries


def load_corpus(path=None):
    """Load the bundled corpus, or a user corpus file."""
    if path is None:
        text = (
            importlib.resources.files("linkhom.data")
            .joinpath("corpus.txt")
            .read_text()
        )
    else:
        with open(path) as f:
            text = f.read()
    return _parse(text)


def corpus_entry(name, path=None):
    for e in load_corpus(path):
        if e.name == name:
            return e
    raise KeyError(name)
