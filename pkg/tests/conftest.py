"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""

from collections import OrderedDict

_outcomes: "OrderedDict[str, list]" = OrderedDict()


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    cid, title = marker.args
    entry = _outcomes.setdefault(cid, [title, True, []])
    if call.excinfo is not None:
        entry[1] = False
        entry[2].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for cid, (title, ok, failed) in sorted(_outcomes.items(), key=lambda kv: int(kv[0][1:])):
        line = f"{cid} {'PASS' if ok else 'FAIL'}  {title}"
        if failed:
            line += f"  (failed: {', '.join(failed)})"
        terminalreporter.write_line(line)
