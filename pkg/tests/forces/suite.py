import unittest

from .test_forces import Casimir, FormFactors, Linearization, RetardedTime, Setup, TotalForce


def suite():
    suite = unittest.TestSuite()
    for case in (Setup, FormFactors, TotalForce, Linearization, Casimir, RetardedTime):
        suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(case))
    return suite
