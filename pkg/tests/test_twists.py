#!/usr/bin/env python3
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Tests for twist functions, certificates and the piecewise reduction.
"""

import pytest
import sys
from fractions import Fraction
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from twisted_recurrence_lab.twists import (
    AffineFormula,
    TwistPiece,
    TwistSpec,
    affine,
    certify,
    constant,
    decompose_piecewise,
    evaluate_twist,
    identity,
    pw_affine_knots,
    pw_affine_pieces,
    tent,
)
from twisted_recurrence_lab.utils.errors import TwistCertificateError

F = Fraction


class TestCatalog:
    """Test the built-in twists."""

    def test_identity(self):
        """f(x) = x, not constant."""
        twist = identity()
        assert twist(F(2, 7)) == F(2, 7)
        assert twist.constant_value is None
        assert twist.global_lipschitz == 1

    def test_constant(self):
        """Decimal strings are read exactly."""
        twist = constant("0.3")
        assert twist.constant_value == F(3, 10)
        assert twist.is_constant
        assert twist(F(9, 10)) == F(3, 10)

    def test_constant_out_of_range(self):
        """Constant values must lie in [0,1]."""
        with pytest.raises(ValueError):
            constant("1.5")

    def test_affine_is_clamped(self):
        """clamp(2x - 1/2) has three exact segments."""
        twist = affine(2, "-0.5")
        assert twist(F(1, 8)) == 0
        assert twist(F(1, 2)) == F(1, 2)
        assert twist(F(7, 8)) == 1
        assert twist.affine_segments() == [
            (F(0), F(1, 4), F(0), F(0)),
            (F(1, 4), F(3, 4), F(2), F(-1, 2)),
            (F(3, 4), F(1), F(0), F(1)),
        ]

    def test_tent_default(self):
        """|x - 1/2| with the left piece at the kink."""
        twist = tent()
        assert len(twist.pieces) == 2
        assert twist(F(0)) == F(1, 2)
        assert twist(F(1, 2)) == 0
        assert twist(F(1, 4)) == F(1, 4)
        assert twist(F(1)) == F(1, 2)

    def test_tent_center_range(self):
        """Kink must be interior."""
        with pytest.raises(ValueError):
            tent(center=0)

    def test_knots(self):
        """Hat through (0,0), (1/2,1), (1,0)."""
        twist = pw_affine_knots([(0, 0), ("0.5", 1), (1, 0)])
        assert twist(F(1, 4)) == F(1, 2)
        assert twist(F(3, 4)) == F(1, 2)
        assert twist.global_lipschitz == 2

    def test_knots_must_increase(self):
        """Knots must be sorted in x."""
        with pytest.raises(ValueError):
            pw_affine_knots([(0, 0), (F(1, 2), 1), (F(1, 4), 0), (1, 1)])

    def test_discontinuous_pieces_left_governs(self):
        """At a shared endpoint the left piece's value is used."""
        twist = pw_affine_pieces([
            {"lo": 0, "hi": "1/2", "slope": 0, "intercept": "0.2"},
            {"lo": "1/2", "hi": 1, "slope": 0, "intercept": "0.8"},
        ])
        assert evaluate_twist(twist, F(1, 2)) == F(1, 5)
        assert evaluate_twist(twist, F(3, 4)) == F(4, 5)

    def test_evaluate_out_of_range(self):
        """Points outside [0,1] are rejected."""
        with pytest.raises(ValueError):
            evaluate_twist(identity(), F(3, 2))

    def test_piece_cap(self):
        """Twists with too many pieces are truncated to the cap."""
        knots = [(F(i, 69), i % 2) for i in range(70)]
        twist = pw_affine_knots(knots)
        assert len(twist.pieces) == 64
        assert twist.pieces[-1].hi == 1

    def test_pieces_must_cover(self):
        """Pieces must start at 0 and end at 1."""
        with pytest.raises(ValueError):
            pw_affine_pieces([{"lo": 0, "hi": "1/2", "slope": 1, "intercept": 0}])


class TestCertificates:
    """Test sampled piece certificates."""

    @pytest.mark.parametrize("twist", [identity(), constant("0.3"), affine(2, "-0.5"), tent()])
    def test_catalog_twists_pass(self, twist):
        """Built-in twists are certified."""
        assert certify(twist).passed

    def test_understated_lipschitz_fails(self):
        """Declared L=1 for a slope-2 piece fails."""
        piece = TwistPiece(F(0), F(1), AffineFormula(F(2), F(0)), "increasing", F(1))
        certificate = certify(TwistSpec("steep", [piece]))
        assert not certificate.passed
        assert not certificate.pieces[0].lipschitz_ok
        assert certificate.pieces[0].worst_ratio == pytest.approx(2.0, rel=1e-9)

    def test_wrong_direction_fails(self):
        """An increasing formula declared decreasing fails."""
        piece = TwistPiece(F(0), F(1), AffineFormula(F(1), F(0)), "decreasing", F(1))
        certificate = certify(TwistSpec("backwards", [piece]))
        assert not certificate.pieces[0].monotone_ok


class TestDecomposition:
    """Test extension of pieces to [0,1]."""

    def test_tent_pieces_extend_by_limits(self):
        """Each extended piece is constant beyond its interval."""
        left, right = decompose_piecewise(tent())
        assert left.interval == (F(0), F(1, 2))
        assert left(F(1, 5)) == F(3, 10)
        assert left(F(4, 5)) == 0
        assert right(F(1, 5)) == 0
        assert right(F(4, 5)) == F(3, 10)
        assert left.lipschitz == 1

    def test_extended_segments_are_exact(self):
        """Extended pieces keep exact affine segments."""
        left, _ = decompose_piecewise(tent())
        assert left.twist.affine_segments() == [
            (F(0), F(1, 2), F(-1), F(1, 2)),
            (F(1, 2), F(1), F(0), F(0)),
        ]

    def test_single_piece_unchanged(self):
        """A one-piece twist is its own extension."""
        twist = identity()
        (piece,) = decompose_piecewise(twist)
        assert piece.twist is twist

    def test_failed_certificate_raises(self):
        """Decomposition refuses uncertified pieces and reports the pair."""
        piece = TwistPiece(F(0), F(1), AffineFormula(F(2), F(0)), "increasing", F(1))
        with pytest.raises(TwistCertificateError) as excinfo:
            decompose_piecewise(TwistSpec("steep", [piece]))
        assert excinfo.value.pair is not None
