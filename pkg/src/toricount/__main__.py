import sys

from toricount.cli import main

sys.exit(main())
