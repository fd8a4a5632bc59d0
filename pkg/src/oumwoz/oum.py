"""Opening-up-minds questionnaire types and per-dialogue score arithmetic.

Participants rate seven statements about people holding the opposite stance
on a 7-point Likert scale, before and after the dialogue. Per category the
score is the mean change of its sub-questions, signed so that positive
always means "more open-minded": the good-reasons rating should rise, the
intellect and morality ratings (unintelligent, immoral, ...) should fall.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError

LIKERT_MIN = 1
LIKERT_MAX = 7

EXPERIENCE_METRICS = (
    "enjoyable",
    "engaging",
    "natural",
    "clear",
    "persuasive",
    "confusing",
    "frustrating",
    "too_complicated",
    "boring",
)
BOT_ONLY_METRICS = ("consistent", "knowledgeable")

INTELLECT_ITEMS = ("unintelligent", "irrational", "ignorant")
MORALITY_ITEMS = ("unethical", "immoral", "bad_moral_character")


def validate_likert(value, name: str = "rating") -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    if not LIKERT_MIN <= value <= LIKERT_MAX:
        raise ValidationError(f"{name} must be in [{LIKERT_MIN}, {LIKERT_MAX}], got {value}")
    return value


@dataclass(frozen=True)
class QuestionnaireResponse:
    """One pre or post questionnaire: good_reasons plus 3+3 category items."""

    good_reasons: int
    intellect: tuple[int, int, int]
    morality: tuple[int, int, int]

    def __post_init__(self):
        validate_likert(self.good_reasons, "good_reasons")
        for name, triple in (("intellect", self.intellect), ("morality", self.morality)):
            if len(triple) != 3:
                raise ValidationError(f"{name} needs exactly 3 ratings, got {len(triple)}")
            for i, v in enumerate(triple):
                validate_likert(v, f"{name}[{i}]")
        object.__setattr__(self, "intellect", tuple(self.intellect))
        object.__setattr__(self, "morality", tuple(self.morality))

    def to_dict(self) -> dict:
        return {
            "good_reasons": self.good_reasons,
            "intellect": list(self.intellect),
            "morality": list(self.morality),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuestionnaireResponse":
        try:
            return cls(
                good_reasons=d["good_reasons"],
                intellect=tuple(d["intellect"]),
                morality=tuple(d["morality"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed questionnaire response: {exc}") from exc


@dataclass(frozen=True)
class ExperienceRatings:
    """Post-chat experience ratings; consistent/knowledgeable only in bot modes."""

    ratings: dict

    def __post_init__(self):
        missing = [m for m in EXPERIENCE_METRICS if m not in self.ratings]
        if missing:
            raise ValidationError(f"experience ratings missing {missing}")
        allowed = set(EXPERIENCE_METRICS) | set(BOT_ONLY_METRICS)
        unknown = [m for m in self.ratings if m not in allowed]
        if unknown:
            raise ValidationError(f"unknown experience metrics {unknown}")
        for name, value in self.ratings.items():
            validate_likert(value, name)

    def has_bot_metrics(self) -> bool:
        return any(m in self.ratings for m in BOT_ONLY_METRICS)

    def to_dict(self) -> dict:
        return dict(self.ratings)


@dataclass(frozen=True)
class OumScores:
    """Signed per-category change for one dialogue; each value in [-6, 6]."""

    good_reasons: float
    intellect: float
    morality: float

    def as_dict(self) -> dict:
        return {
            "good_reasons": self.good_reasons,
            "intellect": self.intellect,
            "morality": self.morality,
        }


def compute_oum_scores(pre: QuestionnaireResponse, post: QuestionnaireResponse) -> OumScores:
    """post-minus-pre for good reasons; pre-minus-post means for the other two."""
    return OumScores(
        good_reasons=float(post.good_reasons - pre.good_reasons),
        intellect=sum(p - q for p, q in zip(pre.intellect, post.intellect)) / 3.0,
        morality=sum(p - q for p, q in zip(pre.morality, post.morality)) / 3.0,
    )


ZERO = "zero"
PLUS_OUM = "plus_oum"
MINUS_OUM = "minus_oum"


def classify(score: float) -> str:
    if score > 0:
        return PLUS_OUM
    if score < 0:
        return MINUS_OUM
    return ZERO


@dataclass(frozen=True)
class CategoryAggregate:
    pct_zero: float
    pct_plus: float
    pct_minus: float
    mean_plus: float | None  # None when the class is empty
    mean_minus: float | None
    overall: float
    n: int


def _aggregate_values(values: list[float]) -> CategoryAggregate:
    n = len(values)
    plus = [v for v in values if v > 0]
    minus = [v for v in values if v < 0]
    zero = n - len(plus) - len(minus)
    return CategoryAggregate(
        pct_zero=100.0 * zero / n,
        pct_plus=100.0 * len(plus) / n,
        pct_minus=100.0 * len(minus) / n,
        mean_plus=sum(plus) / len(plus) if plus else None,
        mean_minus=sum(minus) / len(minus) if minus else None,
        overall=sum(values) / n,
        n=n,
    )


def aggregate(dialogue_scores: list[OumScores]) -> dict[str, CategoryAggregate]:
    """Class percentages, within-class means and the overall mean per category."""
    if not dialogue_scores:
        raise ValidationError("cannot aggregate an empty list of dialogue scores")
    return {
        category: _aggregate_values([getattr(s, category) for s in dialogue_scores])
        for category in ("good_reasons", "intellect", "morality")
    }
