from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("omepkit")
except PackageNotFoundError:
    __version__ = "unknown"
