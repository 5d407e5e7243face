"""
Imagined Speech EEG Decoding Benchmark

speech-bci CLI의 얇은 진입점이에요. 예: python main.py fixtures --check
"""

import sys

from speech_bci.cli import main

if __name__ == "__main__":
    sys.exit(main())
