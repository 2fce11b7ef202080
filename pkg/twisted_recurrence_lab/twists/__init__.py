# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Twist functions f: [0,1] -> [0,1] and their piecewise reduction."""

from twisted_recurrence_lab.twists.base import (
    AffineFormula,
    ExtendedFormula,
    Formula,
    TwistCertificate,
    TwistPiece,
    TwistSpec,
    certify,
    evaluate_twist,
)
from twisted_recurrence_lab.twists.catalog import (
    affine,
    constant,
    identity,
    pw_affine_knots,
    pw_affine_pieces,
    tent,
)
from twisted_recurrence_lab.twists.decompose import ExtendedPiece, decompose_piecewise

__all__ = [
    'AffineFormula',
    'ExtendedFormula',
    'Formula',
    'TwistCertificate',
    'TwistPiece',
    'TwistSpec',
    'certify',
    'evaluate_twist',
    'affine',
    'constant',
    'identity',
    'pw_affine_knots',
    'pw_affine_pieces',
    'tent',
    'ExtendedPiece',
    'decompose_piecewise',
]
