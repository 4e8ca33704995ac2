import unittest
import io
import json
import os
import sys
import tempfile

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from sources.exporter import render, render_csv, render_json, to_plain, write_output
from sources.schemas import OutputSpec


class TestExporter(unittest.TestCase):
    def setUp(self):
        self.records = [
            {"index": 0, "coords": [1 + 2j, 0.5 + 0j]},
            {"index": 1, "coords": np.array([0.25 - 1j, 1.0])},
        ]

    def test_csv_flattens_complex_and_sequences(self):
        lines = render_csv(self.records).splitlines()
        self.assertEqual(lines[0], "index,coords_0_re,coords_0_im,coords_1_re,coords_1_im")
        self.assertEqual(lines[1], "0,1,2,0.5,0")
        self.assertEqual(lines[2], "1,0.25,-1,1,0")

    def test_csv_cells(self):
        text = render_csv([{"name": "g", "passed": True, "value": None, "x": 0.1},
                           {"name": "h", "passed": False, "extra": 3}])
        lines = text.splitlines()
        self.assertEqual(lines[0], "name,passed,value,x,extra")
        self.assertEqual(lines[1], "g,true,,0.10000000000000001,")
        self.assertEqual(lines[2], "h,false,,,3")

    def test_csv_floats_round_trip(self):
        value = 1 / 3
        cell = render_csv([{"x": value}]).splitlines()[1]
        self.assertEqual(float(cell), value)

    def test_json(self):
        data = json.loads(render_json(self.records, {"command": "embed", "n": np.int64(2)}))
        self.assertEqual(data["meta"], {"command": "embed", "n": 2})
        self.assertEqual(data["records"][0]["coords"], [[1.0, 2.0], [0.5, 0.0]])
        self.assertEqual(data["records"][1]["coords"], [[0.25, -1.0], [1.0, 0.0]])

    def test_to_plain(self):
        self.assertEqual(to_plain({1: (1j, np.float64(2.0))}), {"1": [[0.0, 1.0], 2.0]})
        self.assertEqual(to_plain("text"), "text")

    def test_render_dispatch(self):
        self.assertEqual(render(self.records, {}, "csv"), render_csv(self.records))
        self.assertEqual(render(self.records, {}, "json"), render_json(self.records, {}))

    def test_write_to_stream(self):
        stream = io.StringIO()
        text = write_output(self.records, {}, OutputSpec(format="csv"), stream)
        self.assertEqual(stream.getvalue(), text)

    def test_write_to_file_creates_directories(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "nested", "deeper", "out.json")
            text = write_output(self.records, {"command": "embed"}, OutputSpec(format="json", path=path))
            with open(path, encoding="utf-8") as f:
                self.assertEqual(f.read(), text)
            self.assertEqual(json.loads(text)["meta"]["command"], "embed")


if __name__ == "__main__":
    unittest.main()
