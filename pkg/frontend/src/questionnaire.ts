// Questionnaire form models: the seven opening-up-minds items on 7-point
// Likert widgets, topic-dependent stance options, and the post-chat
// experience ratings (two extra metrics in bot modes). Validation happens
// before any network call; missing items surface inline.

import { QuestionnairePayload } from "./channel.js";

export const LIKERT_MIN = 1;
export const LIKERT_MAX = 7;

export interface OumItem {
  id: string;
  category: "good_reasons" | "intellect" | "morality";
  label: string; // {opposite} is substituted with the opposing-stance noun
}

export const OUM_ITEMS: OumItem[] = [
  { id: "good_reasons", category: "good_reasons",
    label: "People who {opposite} have good reasons for it" },
  { id: "unintelligent", category: "intellect", label: "People who {opposite} are unintelligent" },
  { id: "irrational", category: "intellect", label: "People who {opposite} are irrational" },
  { id: "ignorant", category: "intellect", label: "People who {opposite} are ignorant" },
  { id: "unethical", category: "morality", label: "People who {opposite} are unethical" },
  { id: "immoral", category: "morality", label: "People who {opposite} are immoral" },
  { id: "bad_moral_character", category: "morality",
    label: "People who {opposite} are of bad moral character" },
];

export const STANCE_OPTIONS: Record<string, Array<{ value: string; label: string; opposite: string }>> = {
  veganism: [
    { value: "vegan", label: "I am vegan", opposite: "are not vegan" },
    { value: "non_vegan", label: "I am not vegan", opposite: "are vegan" },
  ],
  brexit: [
    { value: "leave", label: "I voted leave", opposite: "voted remain" },
    { value: "remain", label: "I voted remain", opposite: "voted leave" },
  ],
  vaccination: [
    { value: "vaccinated", label: "I have had the vaccine", opposite: "have not had the vaccine" },
    { value: "unvaccinated", label: "I have not had the vaccine", opposite: "have had the vaccine" },
  ],
};

export const EXPERIENCE_METRICS = [
  "enjoyable", "engaging", "natural", "clear", "persuasive",
  "confusing", "frustrating", "too_complicated", "boring",
] as const;

export const BOT_ONLY_METRICS = ["consistent", "knowledgeable"] as const;

function validRating(value: number | undefined): value is number {
  return (
    typeof value === "number" &&
    Number.isInteger(value) &&
    value >= LIKERT_MIN &&
    value <= LIKERT_MAX
  );
}

export class OumFormModel {
  private ratings = new Map<string, number>();
  stance: string | null = null;

  constructor(readonly topic: string, readonly requireStance: boolean) {}

  stanceOptions() {
    return STANCE_OPTIONS[this.topic] ?? [
      { value: "side_a", label: "Side A", opposite: "hold the other view" },
      { value: "side_b", label: "Side B", opposite: "hold the other view" },
    ];
  }

  setRating(itemId: string, value: number): void {
    this.ratings.set(itemId, value);
  }

  rating(itemId: string): number | undefined {
    return this.ratings.get(itemId);
  }

  /** Inline validation: item ids that are missing or out of range. */
  missingItems(): string[] {
    const missing = OUM_ITEMS.filter((item) => !validRating(this.ratings.get(item.id))).map(
      (item) => item.id,
    );
    if (this.requireStance && !this.stance) missing.unshift("stance");
    return missing;
  }

  isComplete(): boolean {
    return this.missingItems().length === 0;
  }

  /** The wire payload; throws if the form is incomplete. */
  payload(): QuestionnairePayload {
    const missing = this.missingItems();
    if (missing.length) throw new Error(`incomplete questionnaire: ${missing.join(", ")}`);
    return {
      good_reasons: this.ratings.get("good_reasons")!,
      intellect: [
        this.ratings.get("unintelligent")!,
        this.ratings.get("irrational")!,
        this.ratings.get("ignorant")!,
      ],
      morality: [
        this.ratings.get("unethical")!,
        this.ratings.get("immoral")!,
        this.ratings.get("bad_moral_character")!,
      ],
    };
  }
}

export class ExperienceFormModel {
  private ratings = new Map<string, number>();
  feedback = ""; // free text, always optional

  constructor(readonly botMode: boolean) {}

  metrics(): string[] {
    return this.botMode
      ? [...EXPERIENCE_METRICS, ...BOT_ONLY_METRICS]
      : [...EXPERIENCE_METRICS];
  }

  setRating(metric: string, value: number): void {
    this.ratings.set(metric, value);
  }

  missingMetrics(): string[] {
    return this.metrics().filter((metric) => !validRating(this.ratings.get(metric)));
  }

  isComplete(): boolean {
    return this.missingMetrics().length === 0;
  }

  payload(): Record<string, number> {
    const missing = this.missingMetrics();
    if (missing.length) throw new Error(`incomplete experience form: ${missing.join(", ")}`);
    const out: Record<string, number> = {};
    for (const metric of this.metrics()) out[metric] = this.ratings.get(metric)!;
    return out;
  }
}
