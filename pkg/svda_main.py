"""
Main entry point for the SVDA command line.
Output root and log level default from environment variables.
"""

import os
import sys

from cli.main import main

# Run root for configs without an explicit output directory
RUN_ROOT = os.environ.get('SVDA_OUTPUT_DIR', 'runs')

if __name__ == '__main__':
    sys.exit(main(run_root=RUN_ROOT))
