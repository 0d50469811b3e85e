# polyzeta/__main__.py
from polyzeta.cli import main

main()
