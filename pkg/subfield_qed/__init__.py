"""
subfield-qed: dimensional reduction of cavity QED into 1D and 2D subfields.
"""
import logging

__version__ = '0.3.0'
__short_version__ = __version__

# Add imports here
from subfield_qed import reporters

reporters.addLoggingLevel('REPORT', logging.WARNING - 5)

from subfield_qed import cavity, interaction, laser, quadrature, reduction, specfun  # noqa: E402
from subfield_qed.cavity import CylinderGeometry, FieldKind, ModeIndex, Polarization  # noqa: E402
from subfield_qed.interaction import (GaussianAtom, Resonance, SubfieldSet, Switching, SwitchingKind,  # noqa: E402
                                      TransitionKind, WindowConvention)
from subfield_qed.laser import BeamModeIndex, HermiteBeam  # noqa: E402
from subfield_qed.scans import ScanKind, run_scan  # noqa: E402
from subfield_qed.selftest import SelfTestLevel, self_test  # noqa: E402
from subfield_qed.settings import ConfigError, Settings  # noqa: E402
