"""Exception hierarchy.

Every error carries a short machine-readable ``code`` used by the CLI when
it writes the error JSON to stderr. Validation problems map to exit code 1,
geometric degeneracies to exit code 2.
"""


class LieBertrandError(Exception):
    code = "error"
    exit_code = 1

    def to_dict(self):
        return {"code": self.code, "message": str(self)}


class ValidationError(LieBertrandError):
    code = "validation_error"
    exit_code = 1


class ConfigError(ValidationError):
    def __init__(self, message, code="invalid_config"):
        super().__init__(message)
        self.code = code


class ExprSyntaxError(ValidationError):
    code = "syntax_error"

    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = tuple(expected)
        detail = f"{message} at offset {position}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)

    def to_dict(self):
        d = super().to_dict()
        d.update(position=self.position, expected=list(self.expected))
        return d


class UnknownIdentifier(ExprSyntaxError):
    code = "unknown_identifier"


class ExpressionDomainError(ValidationError):
    """An expression evaluated to a non-finite value."""

    code = "expression_domain_error"

    def __init__(self, message, subexpression=None):
        self.subexpression = subexpression
        super().__init__(message)


DomainError = ExpressionDomainError


class ShapeMismatch(ValidationError):
    code = "shape_mismatch"


class FrameNotOrthonormal(ValidationError):
    code = "frame_not_orthonormal"


class GeometryError(LieBertrandError):
    code = "degenerate_geometry"
    exit_code = 2


class NonPositiveCurvature(GeometryError):
    code = "non_positive_curvature"


class HelicalDegenerate(GeometryError):
    code = "helical_degenerate"


class PlanarDegenerate(GeometryError):
    code = "planar_degenerate"


class SingularOffset(GeometryError):
    code = "singular_offset"


class DegenerateCurve(GeometryError):
    code = "degenerate_curve"


class NotBertrandPair(GeometryError):
    code = "not_bertrand_pair"
