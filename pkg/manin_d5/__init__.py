import importlib.metadata

__version__ = importlib.metadata.version('django-manin-d5')
