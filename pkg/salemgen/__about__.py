""" About information for salemgen"""


__version__ = "0.1.0"
__title__ = "salemgen"
__author__ = "salemgen"
__email__ = "maintainers@salemgen.dev"
__url__ = "https://github.com/salemgen/salemgen-python"
__license__ = "Apache License 2.0"
