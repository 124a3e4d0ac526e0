import unittest

from .test_units import Helpers, NaturalUnits


def suite():
    suite = unittest.TestSuite()
    suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(NaturalUnits))
    suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(Helpers))
    return suite
