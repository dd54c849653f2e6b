import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

import corpus  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope='session')
def photos():
    return corpus.photos()


@pytest.fixture(scope='session')
def varied_corpus(photos):
    """Corpus photos plus darkened, brightened and mixed variants of a few."""
    images = dict(photos)
    for name in ('astronaut', 'coffee', 'rocket', 'chelsea'):
        for kind, im in corpus.exposure_variants(photos[name]).items():
            images[f'{name}-{kind}'] = im
    return images


# -- acceptance summary -----------------------------------------------------

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if 'test_acceptance.py' not in report.nodeid:
        return
    if report.when == 'call' or (report.when == 'setup' and report.outcome != 'passed'):
        props = dict(report.user_properties)
        _ACCEPTANCE.append((props.get('title', report.nodeid.split('::')[-1]),
                            report.outcome, props.get('detail', '')))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep('=', 'acceptance criteria')
    for title, outcome, detail in _ACCEPTANCE:
        status = 'PASS' if outcome == 'passed' else 'FAIL'
        terminalreporter.write_line(f'{status}  {title}: {detail}')
