import sys

from feeddiv.main import main

sys.exit(main())
