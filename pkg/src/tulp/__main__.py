import sys

from tulp.cli import main

sys.exit(main())
