"""Small helpers for building environments from DSL text."""

from __future__ import annotations

import os
import shutil

from deducto.check import Checker
from deducto.dsl import parse, parse_expr, parse_type_expr
from deducto.deduce import decltype_of, resolve_type_expr
from deducto.typemodel import Env, spell

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CORPUS = os.path.join(REPO, "corpus")
FIXTURES = os.path.join(REPO, "tests", "fixtures")


def env_of(text: str) -> Env:
    """Run the checker over ``text`` and return the resulting scope; errors fail loudly."""
    checker = Checker(parse(text))
    report = checker.run()
    assert report.errors == 0, report.render_text()
    return checker.env


def dt(text: str, env: Env) -> str:
    """Spelling of ``decltype(text)`` in ``env``."""
    return spell(decltype_of(parse_expr(text), env))


def ty(text: str, env: Env | None = None) -> str:
    return spell(resolve_type_expr(parse_type_expr(text), env or Env()))


def find_compiler() -> str | None:
    for cc in (os.environ.get("CXX"), "g++", "clang++", "c++"):
        if cc and shutil.which(cc.split()[0]):
            return cc
    return None
