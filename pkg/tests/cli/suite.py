import unittest

from .test_cli import CommandLine
from .test_config import Configuration, Utilities


def suite():
    suite = unittest.TestSuite()
    for case in (Configuration, Utilities, CommandLine):
        suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(case))
    return suite
