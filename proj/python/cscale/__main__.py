import sys

from ._core import main

code, out, err = main(sys.argv[1:])
sys.stdout.write(out)
sys.stderr.write(err)
sys.exit(code)
