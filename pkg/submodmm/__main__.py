"""Main entry point for running submodmm as a module."""

from .cli import main

if __name__ == "__main__":
    main()
