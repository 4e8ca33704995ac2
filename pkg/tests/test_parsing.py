import unittest
import os
import sys
import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from sources.errors import ParseError
from sources.parsing import (
    format_complex,
    format_word,
    parse_complex,
    parse_matrix,
    parse_point,
    parse_points,
    parse_word,
)


class TestParsing(unittest.TestCase):
    """
    Text formats read by the command line: complex numbers, points, matrices and words.
    """

    def test_parse_complex(self):
        cases = {
            "3": 3 + 0j,
            "-2.5i": -2.5j,
            "1+2i": 1 + 2j,
            "1e-3-4 i": 0.001 - 4j,
            "i": 1j,
            "-i": -1j,
            "1+i": 1 + 1j,
            " 0.5 ": 0.5 + 0j,
            "2j": 2j,
        }
        for text, expected in cases.items():
            with self.subTest(text=text):
                self.assertEqual(parse_complex(text), expected)

    def test_parse_complex_errors(self):
        for text in ("", "abc", "1+", "1+2", "2ii"):
            with self.subTest(text=text):
                with self.assertRaises(ParseError):
                    parse_complex(text)

    def test_format_complex(self):
        self.assertEqual(format_complex(1 - 2j), "1-2i")
        self.assertEqual(format_complex(complex(0.5, -0.0)), "0.5-0i")
        value = complex(1 / 3, 2 / 7)
        self.assertEqual(parse_complex(format_complex(value)), value)

    def test_parse_point(self):
        p = parse_point("[1:1]")
        np.testing.assert_allclose(p.coords, [2 ** -0.5, 2 ** -0.5])
        q = parse_point("  [0.5+2i : 1 : 0]")
        self.assertEqual(q.dim_ambient, 2)

    def test_parse_point_errors(self):
        with self.assertRaises(ParseError) as ctx:
            parse_point("[1:")
        self.assertEqual(ctx.exception.column, 4)
        self.assertEqual(ctx.exception.line, 1)
        with self.assertRaises(ParseError) as ctx:
            parse_point("1:1]")
        self.assertEqual(ctx.exception.column, 1)
        with self.assertRaises(ParseError):
            parse_point("[0:0]")
        with self.assertRaises(ParseError):
            parse_point("[1]")
        with self.assertRaises(ParseError) as ctx:
            parse_point("[1:x]")
        self.assertEqual(ctx.exception.column, 4)

    def test_parse_points(self):
        text = "# sample\n[1:0]\n\n[0:1]\n  # indented comment\n[1:1]\n"
        self.assertEqual(len(parse_points(text)), 3)
        with self.assertRaises(ParseError) as ctx:
            parse_points("[1:0]\n[1:0")
        self.assertEqual(ctx.exception.line, 2)

    def test_parse_matrix(self):
        np.testing.assert_array_equal(parse_matrix("2, 0; 0, 0.5"), np.diag([2.0, 0.5]))
        np.testing.assert_array_equal(parse_matrix("1, i, -i, 2", size=2), np.array([[1, 1j], [-1j, 2]]))
        for text in ("1, 2; 3", "1, 2, 3", "1, 2; ; 3, 4", "1, 2; 3, 4; 5, 6"):
            with self.subTest(text=text):
                with self.assertRaises(ParseError):
                    parse_matrix(text, size=2)

    def test_parse_word(self):
        self.assertEqual(parse_word("g h^-1 g^3"), [("g", 1), ("h", -1), ("g", 3)])
        self.assertEqual(parse_word("  a   b^+2 "), [("a", 1), ("b", 2)])
        self.assertEqual(parse_word(""), [])

    def test_parse_word_errors(self):
        with self.assertRaises(ParseError):
            parse_word("g^0")
        with self.assertRaises(ParseError) as ctx:
            parse_word("g h^")
        self.assertEqual(ctx.exception.column, 3)
        with self.assertRaises(ParseError):
            parse_word("g*h")

    def test_format_word(self):
        tokens = [("g", 1), ("h", -1), ("g", 3)]
        self.assertEqual(format_word(tokens), "g h^-1 g^3")
        self.assertEqual(parse_word(format_word(tokens)), tokens)
        self.assertEqual(format_word([]), "")


if __name__ == "__main__":
    unittest.main()
