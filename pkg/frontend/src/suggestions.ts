// Suggestion panel state: an exact mirror of the last server push, capped
// at 50 rows, with a virtual-scroll window so long lists stay cheap to
// render. The displayed rank is always the server's rank.

import { FilterStance, SuggestionItem } from "./protocol.js";

export const PANEL_CAP = 50;

export interface VirtualWindow {
  start: number; // first visible row index
  end: number;   // one past the last visible row
  topPadPx: number;
  bottomPadPx: number;
}

export class SuggestionPanelModel {
  private items: SuggestionItem[] = [];
  private selectedId: string | null = null;
  filter: FilterStance = "off";

  /** Replace the panel contents with a fresh server push. */
  applyPush(items: SuggestionItem[]): void {
    this.items = items.slice(0, PANEL_CAP);
    if (this.selectedId && !this.items.some((item) => item.argument_id === this.selectedId)) {
      this.selectedId = null;
    }
  }

  rows(): SuggestionItem[] {
    return this.items;
  }

  select(argumentId: string): SuggestionItem | null {
    const item = this.items.find((row) => row.argument_id === argumentId) ?? null;
    this.selectedId = item ? item.argument_id : null;
    return item;
  }

  selected(): SuggestionItem | null {
    return this.items.find((row) => row.argument_id === this.selectedId) ?? null;
  }

  badges(): Array<"pro" | "con"> {
    return this.items.map((item) => item.stance);
  }

  /** Rows to materialize for the viewport plus spacer heights. */
  window(scrollTopPx: number, viewportPx: number, rowPx: number): VirtualWindow {
    const total = this.items.length;
    const start = Math.max(0, Math.min(total, Math.floor(scrollTopPx / rowPx) - 2));
    const visible = Math.ceil(viewportPx / rowPx) + 4;
    const end = Math.min(total, start + visible);
    return {
      start,
      end,
      topPadPx: start * rowPx,
      bottomPadPx: (total - end) * rowPx,
    };
  }
}
