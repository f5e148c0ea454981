"""
Main entry point: load the environment, then hand over to the heiscat command line.
"""

from dotenv import load_dotenv

# error_handler and activity_logger read HEISCAT_* at import time
load_dotenv()

from cli import cli  # noqa: E402


def main():
    cli(obj={})


if __name__ == "__main__":
    main()
