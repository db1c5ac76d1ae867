#!/usr/bin/env python3
"""cellcover command-line launcher."""
import sys

from cellcover.main import main

if __name__ == "__main__":
    sys.exit(main())
