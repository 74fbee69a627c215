"""Shared helper: build an argparse front end from a dataclass config."""

from __future__ import annotations

import argparse
import dataclasses


def parse_config(cls, argv=None, description: str | None = None):
    ap = argparse.ArgumentParser(description=description or cls.__doc__)
    for f in dataclasses.fields(cls):
        default = f.default
        flag = "--" + f.name.replace("_", "-")
        if isinstance(default, bool):
            ap.add_argument(flag, action=argparse.BooleanOptionalAction, default=default)
        elif isinstance(default, tuple):
            kind = type(default[0]) if default else str
            ap.add_argument(flag, nargs="+", type=kind, default=default)
        else:
            ap.add_argument(flag, type=type(default), default=default)
    ns = ap.parse_args(argv)
    return cls(**{f.name: (tuple(v) if isinstance(v, list) else v) for f, v in
                  ((f, getattr(ns, f.name)) for f in dataclasses.fields(cls))})
