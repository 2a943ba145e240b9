"""The command-line workflow: experiment file -> coefficients -> field and far field.

Equivalent shell session::

    mrcscatter run demos/kite.ini --out runs
    mrcscatter field runs/kite_coefficients.csv --grid=-4,4,-4,4 --res 81 --out runs/grid.csv
    mrcscatter farfield runs/kite_coefficients.csv --ndir 360 --out runs/ff.csv

Run: python3 demos/04_command_line.py
"""

import tempfile
from pathlib import Path

import numpy as np

from mrcscatter import cli

here = Path(__file__).parent
with tempfile.TemporaryDirectory() as tmp:
    code = cli.main(["run", str(here / "kite.ini"), "--out", tmp])
    print("run exit code:", code)
    coeffs = str(Path(tmp) / "kite_coefficients.csv")
    cli.main(["field", coeffs, "--grid=-4,4,-4,4", "--res", "41", "--out", str(Path(tmp) / "grid.csv")])
    cli.main(["farfield", coeffs, "--ndir", "360", "--out", str(Path(tmp) / "ff.csv")])
    ff = np.loadtxt(Path(tmp) / "ff.csv", delimiter=",", skiprows=1)
    peak = ff[np.argmax(np.hypot(ff[:, 1], ff[:, 2]))]
    print(f"strongest scattering towards theta = {np.degrees(peak[0]):.1f} deg, |A| = {np.hypot(*peak[1:]):.3f}")
    print("files:", sorted(p.name for p in Path(tmp).iterdir()))
