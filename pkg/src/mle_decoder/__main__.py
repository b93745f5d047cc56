import sys

from mle_decoder.cli import main

sys.exit(main())
