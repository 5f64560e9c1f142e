import sys

from RopeTK.Cli.main import main


sys.exit(main())
