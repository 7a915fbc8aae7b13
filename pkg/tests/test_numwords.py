import pytest

from nlsql.numwords import convert_number_words, extract_numerals


@pytest.mark.parametrize(
    "text,expected",
    [
        ("clicked on the ad at least two times", "clicked on the ad at least 2 times"),
        ("twenty-one items", "21 items"),
        ("nine hundred ninety nine thousand nine hundred ninety nine",
         "999999"),
        ("one hundred five units", "105 units"),
        ("seventeen thousand", "17000"),
        ("zero results", "0 results"),
        ("no numbers here", "no numbers here"),
    ],
)
def test_conversions(text, expected):
    assert convert_number_words(text) == expected


def test_and_is_never_consumed():
    assert convert_number_words("between one and five") == "between 1 and 5"


def test_case_insensitive():
    assert convert_number_words("Two Times") == "2 Times"


def test_extract_numerals_in_order():
    assert extract_numerals("between 10 and 20") == ["10", "20"]
    assert extract_numerals("at least two times out of 7.5") == ["2", "7.5"]
    assert extract_numerals("no digits") == []
