import unittest

from .test_geometry import Contour, Grid, Hull
from .test_scan import Ratios, Scans


def suite():
    suite = unittest.TestSuite()
    for case in (Grid, Contour, Hull, Ratios, Scans):
        suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(case))
    return suite
