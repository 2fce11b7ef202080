# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Reduction of a piecewise twist to globally Lipschitz monotone pieces.

Piece i on (a_i, b_i) becomes f_i: equal to f inside, to the limit of f
from inside at a_i for x <= a_i, and to the limit at b_i for x >= b_i.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

from twisted_recurrence_lab.twists.base import ExtendedFormula, TwistPiece, TwistSpec, certify
from twisted_recurrence_lab.utils.errors import TwistCertificateError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtendedPiece:
    """Globally defined extension of one twist piece."""

    index: int
    interval: Tuple[Fraction, Fraction]
    twist: TwistSpec

    def __call__(self, x):
        return self.twist(x)

    @property
    def lipschitz(self) -> Fraction:
        return self.twist.global_lipschitz


def decompose_piecewise(twist: TwistSpec, samples: int = 1000, seed: int = 0) -> List[ExtendedPiece]:
    """
    Split a twist into extended pieces.

    Raises:
        TwistCertificateError: a piece fails its monotonicity or Lipschitz
            certificate (carries the violating pair)
    """
    certificate = certify(twist, samples=samples, seed=seed)
    for piece_cert in certificate.pieces:
        if not piece_cert.passed:
            raise TwistCertificateError(
                f"piece {piece_cert.index} of twist '{twist.name}' failed its certificate",
                pair=piece_cert.violating_pair,
            )

    out = []
    for index, piece in enumerate(twist.pieces):
        if len(twist.pieces) == 1:
            extended = twist
        else:
            formula = ExtendedFormula(piece.formula, piece.lo, piece.hi)
            extended = TwistSpec(
                f"{twist.name}[{index}]",
                [TwistPiece(Fraction(0), Fraction(1), formula, piece.direction, piece.lipschitz)],
            )
        out.append(ExtendedPiece(index, (piece.lo, piece.hi), extended))

    logger.debug(f"Decomposed twist '{twist.name}' into {len(out)} extended pieces")
    return out
