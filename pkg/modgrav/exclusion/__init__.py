from .grid import BoundaryLine, ExclusionGrid, GridSpec  # noqa
from .contour import extract_boundary  # noqa
from .hull import convex_hull  # noqa
from .scan import (  # noqa
    ChameleonScan,
    Scan,
    ScanResult,
    YukawaScan,
    chameleon_ratio,
    scan_chameleon,
    scan_yukawa,
    yukawa_ratio,
)
