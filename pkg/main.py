import sys

from dotenv import load_dotenv

load_dotenv()

from core.handlers import cli  # noqa: E402  environment must be loaded before the logger is built


def main() -> int:
    return cli(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
