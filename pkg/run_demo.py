#!/usr/bin/env python3
"""Demo script: synthetic and Pitprops runs through the CLI."""

import os

# Set demo environment variables
os.environ.setdefault("SPCART_OUTPUT_DIR", "results/demo")
os.environ.setdefault("LOG_LEVEL", "INFO")

# Import after setting env vars
from spcart.main import main

DEMO_RUNS = [
    ["synth", "--n", "1000", "--seed", "0"],
    ["fit", "--input", "synthetic", "--method", "spcart", "--trunc", "l0", "--lambda", "1/sqrt(p)", "--r", "2"],
    ["fit", "--input", "synthetic", "--method", "rsvd-gp", "--trunc", "sp", "--lambda", "4", "--r", "2"],
    ["fit", "--input", "pitprops", "--method", "pca", "--r", "6"],
    ["compare", "--input", "pitprops", "--methods", "spcart,rsvd-gp,st", "--trunc", "sp",
     "--lambdas", "7,8,9,10", "--r", "6"],
    ["bounds", "--input", "pitprops", "--method", "spcart", "--trunc", "en", "--lambda", "0.15",
     "--r", "6", "--trials", "500"],
]

if __name__ == "__main__":
    print("Running SPCArt demo...")
    print(f"Output directory: {os.environ['SPCART_OUTPUT_DIR']}")
    print("=" * 60)
    for argv in DEMO_RUNS:
        print("$ spcart " + " ".join(argv))
        code = main(argv)
        if code != 0:
            raise SystemExit(code)
