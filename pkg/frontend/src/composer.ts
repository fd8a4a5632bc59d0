// The wizard's message composer. Tracks which suggestion (if any) seeded
// the draft so provenance can report the selection rank and whether the
// text was edited. Edited means byte inequality between the sent text and
// the argument text as selected.

import { Provenance, SuggestionItem } from "./protocol.js";

export class ComposerModel {
  private draft = "";
  private origin: SuggestionItem | null = null;

  text(): string {
    return this.draft;
  }

  setText(text: string): void {
    this.draft = text;
  }

  /** Click on a suggestion: prefill the draft verbatim. */
  prefill(item: SuggestionItem): void {
    this.origin = item;
    this.draft = item.text;
  }

  /** Insert a hedge snippet in front of the current draft. */
  insertHedge(hedge: string): void {
    this.draft = this.draft ? `${hedge} ${this.draft}` : hedge;
  }

  clear(): void {
    this.draft = "";
    this.origin = null;
  }

  canSend(): boolean {
    return this.draft.trim().length > 0;
  }

  edited(): boolean {
    return this.origin !== null && this.draft !== this.origin.text;
  }

  /** Provenance for the draft as it stands; null origin means free compose. */
  provenance(): Provenance {
    if (!this.origin) return { mode: "wizard" };
    return {
      mode: "wizard",
      argument_id: this.origin.argument_id,
      selection_rank: this.origin.rank,
      edited: this.edited(),
      stance: this.origin.stance,
    };
  }

  /** The utterance frame payload, or null when the draft is empty. */
  buildUtterance(): { text: string; provenance: Provenance } | null {
    if (!this.canSend()) return null;
    return { text: this.draft, provenance: this.provenance() };
  }
}
