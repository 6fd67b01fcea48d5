import sys

from bulbpatch.cli.main import main

sys.exit(main())
