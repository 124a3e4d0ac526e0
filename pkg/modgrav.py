#!/usr/bin/env python3

from modgrav.cli import main

if __name__ == "__main__":
    main()
