"""Record the golden stenosis analysis document for the review UI tests.

Run once from the repository root.  Renders the stenosis phantom as a
grayscale image, analyzes it through the CLI (threshold backend), and
copies the resulting document to frontend/tests/fixtures/.
"""

from __future__ import annotations

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from vesselkit import GrayscaleImage
from vesselkit.phantoms import stenosis_bar

FIXTURES = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    bar = stenosis_bar()
    pixels = np.where(bar.pixels, 30, 200).astype(np.uint8)
    with tempfile.TemporaryDirectory() as tmp:
        img_path = Path(tmp) / "stenosis.png"
        img_path.write_bytes(GrayscaleImage.from_array(pixels).png_bytes())
        out = Path(tmp) / "out"
        subprocess.run(
            [sys.executable, "-m", "vesselkit.cli", "analyze", str(img_path),
             "--box", "5,150,440,240", "--backend", "threshold", "--out", str(out),
             "--seed", "5"],
            check=True,
        )
        doc = json.loads((out / "analysis.json").read_text())
        findings = doc["findings"]
        assert len(findings) == 1 and findings[0]["kind"] == "stenosis", findings
        assert abs(findings[0]["change_p"] + 0.6) < 0.1, findings
        shutil.copy(out / "analysis.json", FIXTURES / "stenosis_analysis.json")
    print(f"recorded {FIXTURES / 'stenosis_analysis.json'}")


if __name__ == "__main__":
    main()
