"""Collects acceptance-criterion outcomes and prints one line per criterion."""

_LABELS = {}
_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(label, text): test decides one acceptance criterion"
    )


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            _LABELS[item.nodeid] = mark.args


def pytest_runtest_logreport(report):
    if report.nodeid not in _LABELS:
        return
    label, text = _LABELS[report.nodeid]
    entry = _RESULTS.setdefault(label, {"text": text, "ok": True, "seconds": 0.0})
    if report.failed:
        entry["ok"] = False
    if report.when == "call":
        entry["seconds"] += report.duration
    elif report.when == "setup" and report.skipped:
        entry["ok"] = None


def _order(label):
    head = "".join(c for c in label if c.isdigit())
    return int(head or 0), label


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_RESULTS, key=_order):
        entry = _RESULTS[label]
        verdict = {True: "PASS", False: "FAIL", None: "SKIP"}[entry["ok"]]
        terminalreporter.write_line(
            f"{verdict}  {label:<4} {entry['text']}  ({entry['seconds']:.1f} s)"
        )
