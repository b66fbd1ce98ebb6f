from .core.config import settings

__version__ = settings.app_version
