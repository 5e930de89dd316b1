import pathlib
import subprocess
import sys

SCRIPT = pathlib.Path(__file__).resolve().parents[2] / "tools" / "convert_dates.py"


def convert(text, *args):
    out = subprocess.run([sys.executable, str(SCRIPT), *args], input=text, capture_output=True, text=True,
                         check=True)
    return [float(v) for v in out.stdout.split()]


def test_fractional_years():
    assert convert("1851-07-02T12:00:00\n1851-01-01\n", "--origin", "1851") == [0.0, 0.5]


def test_days_and_hours():
    text = "2020-03-01 06:00:00\n2020-03-03 18:30:00\n"
    assert convert(text, "--unit", "days") == [0.25, 2.0 + 18.5 / 24]
    assert convert(text, "--unit", "hours") == [6.0, 18.5]


def test_comments_are_skipped():
    assert convert("# note\n\n1900-01-01\n", "--origin", "1899") == [1.0]
