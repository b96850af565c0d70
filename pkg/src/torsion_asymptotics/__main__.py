"""Entry point for running with python -m torsion_asymptotics"""

from .main import main

if __name__ == "__main__":
    raise SystemExit(main())
