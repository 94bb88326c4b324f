"""The toponym type system and its literal/associative classification rule.

Eleven fine-grained toponym types collapse onto two top-level groups:
LITERAL (the referent is the physical place) and ASSOCIATIVE (the referent
is merely associated with a place: metonyms, demonyms, languages, homonyms
and associative modifiers). The classifier here is a referee over
annotated features, not an NLP model: context kind, modifier status and
head concreteness come from annotation, never from raw text.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class TopLevel(Enum):
    LITERAL = "Literal"
    ASSOCIATIVE = "Associative"


class TaxonomyType(Enum):
    """Fine-grained toponym types; values double as annotation label strings."""

    LITERAL = "Literal"
    LITERAL_MODIFIER = "LiteralModifier"
    MIXED = "Mixed"
    COERCION = "Coercion"
    EMBEDDED_LITERAL = "EmbeddedLiteral"
    EMBEDDED_ASSOCIATIVE = "EmbeddedAssociative"
    METONYMY = "Metonymy"
    LANGUAGE = "Language"
    DEMONYM = "Demonym"
    NON_LIT_MODIFIER = "NonLitModifier"
    HOMONYM = "Homonym"


# Fixed top-level grouping: the first five are literal, the rest associative.
_TOP_LEVEL = {
    TaxonomyType.LITERAL: TopLevel.LITERAL,
    TaxonomyType.LITERAL_MODIFIER: TopLevel.LITERAL,
    TaxonomyType.MIXED: TopLevel.LITERAL,
    TaxonomyType.COERCION: TopLevel.LITERAL,
    TaxonomyType.EMBEDDED_LITERAL: TopLevel.LITERAL,
    TaxonomyType.EMBEDDED_ASSOCIATIVE: TopLevel.ASSOCIATIVE,
    TaxonomyType.METONYMY: TopLevel.ASSOCIATIVE,
    TaxonomyType.LANGUAGE: TopLevel.ASSOCIATIVE,
    TaxonomyType.DEMONYM: TopLevel.ASSOCIATIVE,
    TaxonomyType.NON_LIT_MODIFIER: TopLevel.ASSOCIATIVE,
    TaxonomyType.HOMONYM: TopLevel.ASSOCIATIVE,
}

# Types with no physical referent of their own; excluded from geocoding
# when they carry no coordinates.
NON_LOCATIONAL_TYPES = frozenset(
    {TaxonomyType.DEMONYM, TaxonomyType.HOMONYM, TaxonomyType.LANGUAGE}
)


class ContextKind(Enum):
    LITERAL_CONTEXT = "LiteralContext"
    ASSOCIATIVE_CONTEXT = "AssociativeContext"
    AMBIGUOUS_OR_MIXED = "AmbiguousOrMixed"


class NPSemantics(Enum):
    NOUN_LITERAL = "NounLiteral"
    ADJECTIVAL_LITERAL = "AdjectivalLiteral"
    NON_TOPONYM = "NonToponym"


@dataclass(frozen=True)
class ToponymFeatures:
    """Annotated features of a toponym mention inside its clause.

    head_concrete describes the noun-phrase head the toponym modifies
    (concrete/static vs abstract/mobile) and is only meaningful when
    is_modifier is true.
    """

    context_kind: ContextKind
    is_modifier: bool
    head_concrete: bool
    np_semantics: NPSemantics


def classify_top_level(features: ToponymFeatures) -> TopLevel:
    """Decide literal vs associative from annotated features.

    Rule: a literal or ambiguous/mixed context makes the toponym literal.
    In an associative context, non-modifiers are associative; modifiers
    are literal only when the head they modify is concrete/static
    ("the British weather"), otherwise associative.
    """
    if features.context_kind in (
        ContextKind.LITERAL_CONTEXT,
        ContextKind.AMBIGUOUS_OR_MIXED,
    ):
        return TopLevel.LITERAL
    if not features.is_modifier:
        return TopLevel.ASSOCIATIVE
    return TopLevel.LITERAL if features.head_concrete else TopLevel.ASSOCIATIVE


def top_level(toponym_type: TaxonomyType) -> TopLevel:
    """Map a fine-grained type onto its literal/associative group."""
    return _TOP_LEVEL[toponym_type]
