import sys

from scott_spectra.cli import main

sys.exit(main())
